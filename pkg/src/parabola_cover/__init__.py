"""Exact covers of the points of [0, 1] close to integer quadratics.

Modules: ``exact`` (rationals and quadratic irrationals), ``scales``
(approximating and dimension functions), ``polys`` (integer quadratics and
dyadic blocks), ``sets`` (exact solution sets), ``cover`` (level covers and
g-sums), ``audit`` (exhaustive checks), ``asymptotics`` (series and
dimension), ``cli`` (command-line driver).
"""

__version__ = "0.1.0"
