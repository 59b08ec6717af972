"""
Windowed Fourier transform of the reflected cutoff
==================================================

The reflection O_xi sends x to the mirror image across the plane orthogonal
to a spacelike xi. Multiplying a cutoff by its odd reflection and taking the
Fourier transform along xi cancels exactly, so the wavefront set misses xi.
For a timelike direction there is nothing to cancel.
"""
import numpy as np

from hadamard_extract.cli import WAVEFRONT_PROFILE, direction
from hadamard_extract.minkowski import classify, reflect, windowed_fourier

lambdas = np.linspace(1.0, 20.0, 20)
for theta in (0.0, 60.0, 90.0, 120.0):
    xi = direction(theta, 2)
    res = windowed_fourier(WAVEFRONT_PROFILE, xi, lambdas, 2, tol=1e-10, symmetric=False)
    print("theta=%5.1f  %-9s  max |F(lambda)| = %.2e" % (theta, classify(xi).value, res.max_abs))

# the reflection is an involutive Lorentz isometry that reverses time orientation
xi = direction(70.0, 3, 40.0)
x = np.array([1.0, 0.3, -0.2])
print("\nx = %s  O x = %s  O O x = %s" % (x, reflect(xi, x), reflect(xi, reflect(xi, x))))
