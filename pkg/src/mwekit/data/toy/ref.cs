Stejně jako v městském autobuse či tramvaji .
