"""Mean-field fixed point of an ERGM and the regime flags derived from it.

With ``Phi(a) = sum_i beta_i e_i a^(e_i - 1)`` and
``phi(a) = exp(2 Phi(a)) / (exp(2 Phi(a)) + 1)``, the edge density ``p`` solves
``phi(p) = p``, equivalently ``2 Phi(p) = log(p / (1 - p))``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

GRID_STEP = 1e-4
ROOT_XTOL = 1e-15


@dataclass(frozen=True)
class FixedPointReport:
    p: float
    phi_prime_p: float
    Phi_prime_1: float
    roots_found: int
    subcritical: bool
    dobrushin: bool
    residual: float
    roots: tuple[float, ...] = ()

    def to_json(self) -> dict:
        d = asdict(self)
        d["roots"] = list(self.roots)
        return d


def _terms(spec):
    """(beta, edge-count) pairs from an ErgmSpec or a plain sequence of pairs."""
    if hasattr(spec, "terms"):
        return [(float(b), m.e) for m, b in spec.terms]
    return [(float(b), int(e)) for b, e in spec]


def phi_cap(spec, a):
    """Phi(a) = sum_i beta_i e_i a^(e_i - 1)."""
    a = np.asarray(a, dtype=float)
    return sum(b * e * a ** (e - 1) for b, e in _terms(spec)) + 0.0 * a


def phi_cap_prime(spec, a):
    a = np.asarray(a, dtype=float)
    return sum(b * e * (e - 1) * a ** (e - 2) for b, e in _terms(spec) if e >= 2) + 0.0 * a


def phi(spec, a):
    return expit(2.0 * phi_cap(spec, a))


def phi_prime(spec, a):
    f = phi(spec, a)
    return 2.0 * phi_cap_prime(spec, a) * f * (1.0 - f)


def fixed_point_residual(spec, p: float) -> float:
    """|2 Phi(p) - log(p / (1 - p))|."""
    return float(abs(2.0 * phi_cap(spec, p) - np.log(p / (1.0 - p))))


def solve_p(spec) -> FixedPointReport:
    """Locate every root of phi(a) - a in (0, 1) and classify the regime.

    Roots are bracketed by a sign-change scan on a 1e-4 grid and refined with
    Brent's method. A root exactly on a grid node is taken as is.
    """
    terms = _terms(spec)
    if any(b < 0 for b, _ in terms[1:]):
        raise ValueError("beta_2..beta_k must be nonnegative; region classification assumes it")

    def f(a):
        return float(phi(spec, a)) - a

    grid = np.linspace(0.0, 1.0, int(round(1.0 / GRID_STEP)) + 1)
    vals = phi(spec, grid) - grid
    roots: list[float] = []
    for k in range(len(grid) - 1):
        lo, hi = vals[k], vals[k + 1]
        if lo == 0.0 and 0.0 < grid[k] < 1.0:
            roots.append(float(grid[k]))
        elif lo * hi < 0.0:
            roots.append(float(brentq(f, grid[k], grid[k + 1], xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)))
    if not roots:
        raise RuntimeError("no root of phi(a) = a found in (0, 1)")

    residuals = [abs(f(r)) for r in roots]
    p = roots[int(np.argmin(residuals))]
    dphi = float(phi_prime(spec, p))
    Phi1 = float(sum(b * e * (e - 1) for b, e in terms[1:]))
    return FixedPointReport(
        p=p,
        phi_prime_p=dphi,
        Phi_prime_1=Phi1,
        roots_found=len(roots),
        subcritical=len(roots) == 1 and dphi < 1.0,
        dobrushin=Phi1 < 2.0,
        residual=fixed_point_residual(spec, p),
        roots=tuple(roots),
    )
