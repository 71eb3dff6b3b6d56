#!/usr/bin/env python3
"""Regenerates the reference constants frozen into tests/oracles.hpp.

Every value is computed here by an independent route (closed forms, plain
bisection, composite Simpson quadrature) so the C++ implementation can be
checked against numbers that do not share its code paths.  Run and paste:

    python3 tools/make_oracles.py
"""

import math


def bisect(f, lo, hi, tol=1e-15, it=200):
    flo = f(lo)
    for _ in range(it):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo) < tol * max(1.0, abs(mid)):
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def simpson(f, a, b, n=200001):
    if n % 2 == 0:
        n += 1
    h = (b - a) / (n - 1)
    s = f(a) + f(b)
    for i in range(1, n - 1):
        s += f(a + i * h) * (4 if i % 2 else 2)
    return s * h / 3.0


def emit(name, value, note=""):
    print(f"{name:32s} = {value:.17g}" + (f"   // {note}" if note else ""))


# --- Cramer exponent of the two-atom law {(0.5, .6), (1.5, .4)} -------------
kappa2 = bisect(lambda k: 0.6 * 0.5**k + 0.4 * 1.5**k - 1.0, 1.0, 3.0)
emit("two_atom_kappa", kappa2, "root of 0.6*0.5^k + 0.4*1.5^k = 1")
emit("two_atom_residual", 0.6 * 0.5**kappa2 + 0.4 * 1.5**kappa2 - 1.0)

# --- E Z^2 ln Z^2 for standard normal Z ------------------------------------
closed = 2.0 - 0.5772156649015328606 - math.log(2.0)
quad = simpson(
    lambda z: (z * z * math.log(z * z) if z > 0 else 0.0)
    * 2.0 * math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi),
    1e-12, 40.0)
emit("normal_z2lnz2_closed", closed, "2 - gamma - ln 2")
emit("normal_z2lnz2_quad", quad, "Simpson cross-check")
emit("c_gauss", 1.0 / closed)

# --- discrete-noise C_lambda ------------------------------------------------
emit("c_disc_lambda1", 1.0 / math.log(2.0))
emit("c_disc_lambda05",
     2.0 / (1.5 * math.log(1.5) + 0.5 * math.log(0.5)))

# --- Kevei family, alpha=0.5 kappa=1 v0=1 p=0.05 ---------------------------
# integral of v^{-3/2} e^{-v} over [1,inf) = 2/e - 2 sqrt(pi) erfc(1)
integral_closed = 2.0 / math.e - 2.0 * math.sqrt(math.pi) * math.erfc(1.0)
integral_quad = simpson(lambda v: v**-1.5 * math.exp(-v), 1.0, 60.0)
c = 1.0 / integral_closed
mgf = 2.0 * c            # c * v0^-alpha / alpha
p = 0.05
up = p * mgf
w = -math.log((1.0 - up) / (1.0 - p))
accept = 0.5 * math.e / c  # alpha v0^alpha e^{kappa v0} / c
emit("kevei_density_integral", integral_closed, "2/e - 2 sqrt(pi) erfc(1)")
emit("kevei_density_integral_quad", integral_quad)
emit("kevei_c", c)
emit("kevei_mgf", mgf)
emit("kevei_up_mass", up)
emit("kevei_w", w)
emit("kevei_accept", accept)
emit("kevei_balance", (1 - p) * math.exp(-w) + up, "E A^kappa, must be 1")
# tilted truncated moment h(x) = up_mass * (2 sqrt(x) - 1) for x >= 1
emit("kevei_h_at_1", up)
emit("kevei_h_at_100", up * (2.0 * math.sqrt(100.0) - 1.0))
# tilted tail up_mass / sqrt(x) for x >= 1
for x in (2.0, 5.0, 10.0):
    emit(f"kevei_tail_at_{int(x)}", up / math.sqrt(x))

# --- Bruin b_n for ell = ln at n = 1e6 -------------------------------------
b = 1e6 * math.log(1e6)
for _ in range(200):
    b = 1e6 * math.log(b)
emit("bruin_log_1e6_fixed_point", b, "solves b = 1e6 ln b")
emit("bruin_log_1e6_formula", 1e6 * math.log(1e6))
emit("bruin_log_1e6_ratio", 1e6 * math.log(1e6 * math.log(1e6)) / (1e6 * math.log(1e6)))

# --- St. Petersburg bookkeeping --------------------------------------------
# Y = 2^T, P(T=m) = 2^-m.  truncated mean at x: floor(log2 x) for x >= 2;
# P(Y > x) = 2^-floor(log2 x).
n = 2**20
a = (math.log(n)) ** -0.5
bn = n * 20.0
t = a * bn
probe = n * 2.0 ** (-math.floor(math.log2(t)))
emit("stp_an_at_2p20", a)
emit("stp_cut_at_2p20", t)
emit("stp_probe_value_2p20", probe, "n * P(Y > a_n b_n), exact staircase")

# --- g_A spot values --------------------------------------------------------
emit("ga_rho_half_prefactor", math.sin(math.pi / 2) / (math.pi * 0.25), "4/pi")
emit("ga_rho_half_at_e4", math.sin(math.pi / 2) / (math.pi * 0.25) * 2.0)
emit("clt7_target_scale", math.sqrt(1.0 / math.log(2.0)), "sqrt(beta C), beta=1")

# --- lognormal kappa --------------------------------------------------------
emit("lognormal_kappa_mu_m05_s1", 1.0, "-2 mu / sigma^2")

# --- Ap4 condition-2a ratio: exp(beta (ln x)^{2 beta - 1}) asymptote --------
bta = 0.75
for x in (1e6, 1e9, 1e12):
    lx = math.log(x)
    ell = lambda y: math.exp(math.log(y) ** bta)
    emit(f"ap4_2a_ratio_1e{int(math.log10(x))}", ell(x * ell(x)) / ell(x))
