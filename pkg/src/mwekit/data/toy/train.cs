Městský autobus měl zpoždění .
Do práce jsem jel městským autobusem .
Stejně jako v městském autobuse či tramvaji .
Uživatelé sítě vidí své zprávy .
Veřejná doprava je levná .
Veřejná doprava v Praze funguje dobře .
Mnoho uživatelů sítě si stěžovalo .
Nástěnná mapa je stará .
Koupil novou nástěnnou mapu .
Autobusová zastávka je blízko .
Čekejte na autobusové zastávce .
Městský autobus staví na autobusové zastávce .
Uživatelé sítě mají rádi veřejnou dopravu .
Dnes je hezké počasí .
Čte knihu .
Vlak přijel včas .
Veřejná doprava je pro studenty zdarma .
Naši uživatelé sítě jsou spokojeni .
Stará nástěnná mapa tady visí .
Máme rádi městský autobus .
