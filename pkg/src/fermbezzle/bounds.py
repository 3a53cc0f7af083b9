"""Covariance-level bounds on the trace distance of Gaussian states.

The central quantity is

    eta(A, B) = || sqrt(1 - A) sqrt(B) - sqrt(A) sqrt(1 - B) ||_2,

which controls the trace distance of passive states from both sides:
``1 - exp(-eta^2 / 2) <= dist(rho_A, rho_B) <= sqrt(2) eta``.  For self-dual
covariances the same functional satisfies ``1 - exp(-eta^2 / 4) <= dist <= eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .covariance import Covariance, as_covariance
from .errors import BoundViolation, DimensionMismatch, WindowViolation
from .linalg import sqrt_complement, sqrt_psd, trace_norm
from .selfdual import SelfDualCovariance


class Convention(str, Enum):
    PASSIVE = "passive"
    SELFDUAL = "selfdual"


@dataclass(frozen=True)
class BoundReport:
    eta: float
    lower: float
    upper: float
    convention: Convention

    def contains(self, value: float, tol: float = 1e-9) -> bool:
        return self.lower - tol <= value <= self.upper + tol


def _matrix(x) -> np.ndarray:
    if isinstance(x, (Covariance, SelfDualCovariance)):
        return x.matrix
    return as_covariance(x).matrix


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = _matrix(a), _matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape}")
    return a, b


def _sqrt_pair(x):
    if isinstance(x, Covariance):
        return x.sqrt(), x.sqrt_complement()
    m = _matrix(x)
    return sqrt_psd(m), sqrt_complement(m)


def eta(a, b) -> float:
    """The eta functional for two (passive or self-dual) covariances of equal size."""
    _pair(a, b)
    sa, ca = _sqrt_pair(a)
    sb, cb = _sqrt_pair(b)
    return float(np.linalg.norm(ca @ sb - sa @ cb))


def sandwich(a, b) -> BoundReport:
    """Two-sided trace-distance bracket from ``eta``.

    The convention follows the input type: :class:`SelfDualCovariance`
    inputs use ``(1 - e^{-eta^2/4}, eta)``, passive inputs
    ``(1 - e^{-eta^2/2}, sqrt(2) eta)``.
    """
    value = eta(a, b)
    if isinstance(a, SelfDualCovariance) or isinstance(b, SelfDualCovariance):
        lower, upper, conv = 1.0 - math.exp(-value ** 2 / 4.0), value, Convention.SELFDUAL
    else:
        lower, upper, conv = 1.0 - math.exp(-value ** 2 / 2.0), math.sqrt(2.0) * value, Convention.PASSIVE
    return BoundReport(value, lower, min(1.0, upper), conv)


def _in_window(c: Covariance, delta: float, tol: float = 1e-12) -> bool:
    lam = c.eigenvalues
    return bool(lam.min() >= delta - tol and lam.max() <= 1.0 - delta + tol)


def ps_trick_bound(a, b, delta: float, *, check: bool = False) -> float:
    """Upper bound on ``eta(A, B)^2`` from the Frobenius distance.

    Requires ``delta <= A <= 1 - delta``; returns ``(4/delta) ||A - B||_2^2``,
    improved to ``(1/delta) ||A - B||_2^2`` when ``B`` is confined as well.
    With ``check=True`` the inequality is evaluated and
    :class:`BoundViolation` raised if it fails.
    """
    a, b = as_covariance(a), as_covariance(b)
    _pair(a, b)
    if not _in_window(a, delta):
        raise WindowViolation(f"spectrum of A leaves [{delta}, {1 - delta}]")
    factor = 1.0 if _in_window(b, delta) else 4.0
    bound = factor / delta * float(np.linalg.norm(a.matrix - b.matrix)) ** 2
    if check and eta(a, b) ** 2 > bound * (1 + 1e-9) + 1e-12:
        raise BoundViolation(f"eta^2 = {eta(a, b) ** 2:.6g} exceeds {bound:.6g}")
    return bound


def eta_trace_norm_bound(s, t, *, check: bool = True) -> float:
    """``2 ||S - T||_1``, an upper bound on ``eta(S, T)^2``."""
    a, b = _pair(s, t)
    bound = 2.0 * trace_norm(a - b)
    if check and eta(s, t) ** 2 > bound + 1e-10:
        raise BoundViolation(f"eta^2 = {eta(s, t) ** 2:.6g} exceeds 2||S - T||_1 = {bound:.6g}")
    return bound


def bittel_bound(f, g) -> float:
    """``||F - G||_1``: the trace-norm covariance bound on the trace distance."""
    a, b = _pair(f, g)
    return trace_norm(a - b)


def entropy_lower_bound(eps: float) -> float:
    """``floor(1 / (4 eps)) log 2`` nats for an ``eps``-dense covariance."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    return math.floor(1.0 / (4.0 * eps)) * math.log(2.0)
