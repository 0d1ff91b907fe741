Stejně jako v městském autobuse či tramvaji .
Muzeum otevírá v poledne .
Uživatelé sítě vidí zprávy .
Podíval se na nástěnnou mapu .
Děti milují zoo .
