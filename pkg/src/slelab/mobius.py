"""Möbius transformations used to move between the disk and the half-plane."""

import cmath
import math

import numpy as np

from .geometry import INFINITY, is_infinity


class MobiusMap:
    """z -> (a z + b) / (c z + d) on the Riemann sphere, with pole bookkeeping."""

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = complex(a), complex(b), complex(c), complex(d)
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise ValueError("degenerate Möbius map")
        self.det = det

    @property
    def pole(self):
        """Preimage of infinity."""
        return INFINITY if self.c == 0 else -self.d / self.c

    @property
    def image_of_infinity(self):
        return INFINITY if self.c == 0 else self.a / self.c

    def __call__(self, z):
        if is_infinity(z):
            return self.image_of_infinity
        z = complex(z)
        den = self.c * z + self.d
        if den == 0:
            return INFINITY
        return (self.a * z + self.b) / den

    def evaluate(self, z):
        """Vectorised evaluation on finite points; poles give complex inf."""
        z = np.asarray(z, dtype=np.complex128)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z):
        if is_infinity(z):
            raise ValueError("derivative at infinity is not defined for this handle")
        den = self.c * complex(z) + self.d
        if den == 0:
            return INFINITY
        return self.det / den**2

    def inverse(self):
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other):
        """self ∘ other."""
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return MobiusMap(a, b, c, d)


class DiskToHalfPlane(MobiusMap):
    """g(z) = e^{-iθ} (z - 1) / (z - e^{-2iθ}).

    Sends 1 to 0, e^{-2iθ} to infinity and 0 to e^{iθ}; |g'(0)| = 2 sin θ.
    """

    def __init__(self, theta):
        theta = float(theta)
        if not (0.0 < theta < math.pi):
            raise ValueError("theta must lie in (0, pi)")
        self.theta = theta
        rot = cmath.exp(-1j * theta)
        super().__init__(rot, -rot, 1.0, -cmath.exp(-2j * theta))


def mobius_disk_to_half(theta):
    """Handle for the disk-to-half-plane map with 1 -> 0, e^{-2iθ} -> ∞, 0 -> e^{iθ}."""
    return DiskToHalfPlane(theta)

