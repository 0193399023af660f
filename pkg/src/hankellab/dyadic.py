"""Dyadic partition of unity on the annulus A_{1/2,2}.

The bump is chi(|u|) - chi(2|u|) with chi a smooth step glued from the
standard exp(-1/t) mollifier: 1 on [0,1], 0 on [2,inf).  The squared
variant renormalizes by the locally finite sum so the squares telescope
to 1; the denominator is bounded below on the support, so smoothness is
preserved.
"""

from dataclasses import dataclass

import numpy as np

SUPPORT = (0.5, 2.0)
# values below this are identically zero as far as the partition is concerned
ZERO_CLIP = 1e-300


def _glue(t):
    """exp(-1/t) for t > 0, else 0; the C^infty gluing function."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        out = np.where(t > 0.0, np.exp(-1.0 / np.where(t > 0.0, t, 1.0)), 0.0)
    return out


def smoothstep(t):
    """C^infty monotone step: 0 for t <= 0, 1 for t >= 1."""
    a = _glue(t)
    return a / (a + _glue(1.0 - np.asarray(t, dtype=float)))


def smooth_chi(r):
    """Smooth radial cutoff: 1 on [0,1], 0 on [2,inf)."""
    return 1.0 - smoothstep(np.asarray(r, dtype=float) - 1.0)


@dataclass(frozen=True)
class DyadicPartition:
    """Radial bump psi supported in A_{1/2,2} whose dyadic dilates sum to 1.

    variant 'plain' sums to 1, 'squared' has squares summing to 1.
    """

    variant: str

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        base = smooth_chi(r) - smooth_chi(2.0 * r)
        base = np.where(np.abs(base) < ZERO_CLIP, 0.0, base)
        if self.variant == "plain":
            return base
        den = np.zeros_like(base)
        for k in range(-3, 4):
            b = smooth_chi(2.0**-k * r) - smooth_chi(2.0 ** (1 - k) * r)
            den += b * b
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(base != 0.0, base / np.sqrt(np.where(den > 0, den, 1.0)), 0.0)
        return out

    def __call__(self, u):
        """Evaluate at vector arguments; last axis indexes the d components."""
        u = np.asarray(u, dtype=float)
        return self.radial(np.sqrt(np.sum(u * u, axis=-1)))

    def dilated(self, j, u):
        """psi(2^{-j} u) at vector arguments."""
        return self(np.asarray(u, dtype=float) * 2.0**-j)

    def sum_over(self, j_lo, j_hi, r):
        """Partial telescoping sum over j in [j_lo, j_hi] at radius r."""
        r = np.asarray(r, dtype=float)
        acc = np.zeros_like(r)
        for j in range(j_lo, j_hi + 1):
            p = self.radial(2.0**-j * r)
            acc += p * p if self.variant == "squared" else p
        return acc


def make_partition(variant="plain"):
    """Build the dyadic partition bump; variant 'plain' or 'squared'."""
    if variant not in ("plain", "squared"):
        raise ValueError("variant must be 'plain' or 'squared'")
    return DyadicPartition(variant)
