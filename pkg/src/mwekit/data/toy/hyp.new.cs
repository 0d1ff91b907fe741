Jen jako v městském autobuse nebo tramvaji .
