Jako ve městé autobuse nebo tramvaji .
