"""Calibrated constants.

The existence-only constants of the wavelength-scale estimates are frozen
here from the sweeps in ``demos/calibrate_constants.py``.  Each value is the
extreme implied constant observed in its sweep with roughly 25% headroom
(observed value in the trailing comment).
"""

# monotonicity of the doubling index under A q1 subset q (A = 16)
C0 = 1.0  # 0.763
# sup_{4B/3}|h| <= C7 2^N sup_B |h|
C7 = 0.125  # 0.089
# gradient bound at wavelength scale: sup_{B_{r/2}} |grad u| <= C1 max_{dB_r} |u| / r
C1 = 1.25  # 1.016
# one-sided bound: sup_{B_{2r/3}} |u| <= C2 max_{dB_r} u
C2 = 1.25  # 0.999
# Harnack corollary floor: sup_B h >= c sup_{2B/3} |h|
HARNACK_FLOOR = 0.75  # 1.005 (minimum)
# nodal density: dist(x, {u = 0}) <= C_DENS / sqrt(lam)
C_DENS = 3.0  # 2.336
# wavelength-scale radius factor: r < EPSILON / sqrt(lam)
EPSILON = 0.1
# largest epsilon with a violation-free weak maximum principle sweep (bisection gave 10.65)
EPSILON_MAX = 3.0
