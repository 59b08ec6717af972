"""
Mellin transform of a bump, continued to the whole plane
========================================================

The Mellin transform of a compactly supported profile converges only for
Re(alpha) > 0. Integrating by parts repeatedly pushes it to the left, and the
poles that appear at alpha = -k carry the Taylor coefficients of the profile.
Dividing by Gamma((alpha + 1)/2) gives M', which is finite at the odd
negative integers and is what the line pairings consume.
"""
import math

from hadamard_extract.mellin import (BumpFunction, eval_bump, mellin, mellin_continued, mellin_prime,
                                     odd_part, scale)

# an asymmetric profile: (1 + 2u - u^2) exp(-1/(1 - u^2)), u = (t - 0.3)/1.0
f = BumpFunction.standard(0.3, 1.0, (1, 2, -1))

# inside the strip the continued value is the plain integral
alpha = 0.7 + 0.4j
print("direct    M(f)(%s) = %s" % (alpha, mellin(f, alpha)))
print("continued M(f)(%s) = %s" % (alpha, mellin_continued(f, alpha).value))

# at alpha = -k the residue is the k-th Taylor coefficient at 0
print("\n k   residue              f^(k)(0)/k!")
for k in range(7):
    res = mellin_continued(f, -k).residue.real
    print("%2d  % .15e  % .15e" % (k, res, eval_bump(f, 0.0, k) / math.factorial(k)))

# M' of the canonical odd bump t exp(-1/(1 - t^2)) at the odd negative integers
g = BumpFunction.canonical()
print("\nM'(g)(-1) = %.15f   (f'(0)/2 = 1/(2e) = %.15f)" % (mellin_prime(g, -1).real, 1 / (2 * math.e)))
for a in (-3, -5):
    print("M'(g)(%d) = %.15e" % (a, mellin_prime(g, a).real))

# scaling law M(f_s)(alpha) = s^alpha M(f)(alpha), also after continuation
h = odd_part(f)
for a in (2.5, -1.5):
    lhs = mellin_continued(scale(h, 0.25), a).value
    rhs = 0.25 ** a * mellin_continued(h, a).value
    print("alpha=%4.1f  M(f_s)=% .12e  s^alpha M(f)=% .12e" % (a, lhs.real, rhs.real))
