"""
Riesz distributions paired with test functions
==============================================

R(alpha) is c_alpha gamma(x)^((alpha-d)/2) on the future cone when
Re(alpha) > d. For smaller alpha the pairing with a test function phi is
defined through the wave operator: R(alpha)[phi] = R(alpha + 2k)[box^k phi].
At alpha = 0 the family reproduces the delta distribution.
"""
import numpy as np

from hadamard_extract.mellin import BumpFunction
from hadamard_extract.riesz import random_test_function, riesz_line_pair, riesz_pair

rng = np.random.default_rng(3)
for d in (2, 3, 4):
    phi = random_test_function(rng, d)
    print("d=%d  R(0)[phi] = %.14f   phi(0) = %.14f" % (d, riesz_pair(0, d, phi), phi(np.zeros(d))))

# one step of the recursion, across the boundary where the cone weight stops
# being locally integrable
d = 3
phi = random_test_function(rng, d)
for alpha in (-1.5, 0.5, 2.5, 4.5):
    base = riesz_pair(alpha, d, phi)
    step = riesz_pair(alpha, d, phi, extra=1)
    print("alpha=%4.1f  R(alpha)[phi]=% .12f  R(alpha+2)[box phi]=% .12f" % (alpha, base, step))

# pulled back to the time axis, the pairing is a single M' evaluation; below
# alpha = d it is the only route, above it agrees with the pointwise integral
g = BumpFunction.standard(0.1, 0.8, (1, 2))
for alpha in (1.0, 2.5, 4.0, 5.5):
    print("d=4 alpha=%.1f  line pairing %.12e" % (alpha, riesz_line_pair(alpha, 4, g=g)))
