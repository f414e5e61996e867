import math

from levycap import GaugeQuery, LevyTriplet, Sign, SetGrid, condition_e_check, g_gamma

poisson = LevyTriplet.poisson(1.0)

for x in (0.1, 0.5, math.pi / 3):
    plus = g_gamma(GaugeQuery(poisson, 0.5, x))
    minus = g_gamma(GaugeQuery(poisson, 0.5, x, Sign.MINUS))
    print(f"x={x:.4f}  g+ {plus.kind:<9}  g- = {minus.value}")

# the negative part vanishes on [0, pi/3] while the positive part diverges
mu = SetGrid.interval(0.0, math.pi / 3, 16).measure()
print(condition_e_check(poisson, mu, 0.5).verdict)
