"""
Hadamard coefficients recovered from the Green's operator
=========================================================

For the Klein-Gordon operator box - c on flat space the Hadamard coefficients
are V^k = c^k. The pipeline below only sees the smeared causal propagator of
box - c - z, sampled on a contour in z and on a grid of smearing widths s,
and reads V^K off a single coefficient of the resulting double expansion.
"""
from fractions import Fraction

from hadamard_extract.combinatorics import Placeholders, xi_weights
from hadamard_extract.expansion import numeric_mprime, smallk_value
from hadamard_extract.extraction import hadamard_report
from hadamard_extract.mellin import BumpFunction

f = BumpFunction.canonical()
c = Fraction(3, 2)

print(" d  K  o   extracted            c^K      rel. error  worst cond.")
for d in (3, 4):
    for K in range(4):
        for o in (0, 2):
            rep = hadamard_report(c, K, o, d, f)
            print("%2d %2d %2d  %.15f  %-7s  %.1e     %.1e"
                  % (d, K, o, rep.value.real, c ** K, rep.relative_error, max(rep.conditions)))

# the extraction weights in exact arithmetic, with M' kept symbolic
weights = xi_weights(2, 0, 4, Placeholders())
print("\nweights for K=2, o=0, d=4:")
for w, e, p in zip(weights.weights, weights.exponents, weights.zpowers):
    print("  L[s^%s, z^%d]  %s" % (e, p, w))

# in even dimension and small K a single coefficient suffices
mp = numeric_mprime(f)
for K in (0, 1):
    rep = hadamard_report(c, K, 4 // 2 - 1 - K, 4, f)
    val = smallk_value(lambda e, p: rep.coefficients[(e, p)], K, 4, mp)
    print("small-k formula, K=%d: %.15f" % (K, complex(val).real))
