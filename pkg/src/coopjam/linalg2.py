"""Closed-form complex linear algebra in dimension two.

Everything here works on Python scalars (``complex``/``float``); the solver
evaluates thousands of tiny 2x2 problems per call and numpy's per-call
overhead would dominate.

Conventions
-----------
A ``ComplexPair`` ``v`` is a column vector. ``quad_form(S, v)`` evaluates
``v^T S v^*`` which is how channel/covariance products appear in the rate
expressions (``h^T Sigma h^*``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import ZeroChannelError

PSD_TOL = 1e-10


class ComplexPair(NamedTuple):
    c1: complex
    c2: complex

    def norm_sq(self) -> float:
        return abs(self.c1) ** 2 + abs(self.c2) ** 2

    def norm(self) -> float:
        return math.hypot(abs(self.c1), abs(self.c2))

    def conj(self) -> ComplexPair:
        return ComplexPair(self.c1.conjugate(), self.c2.conjugate())

    def scale(self, s: complex) -> ComplexPair:
        return ComplexPair(s * self.c1, s * self.c2)

    def is_finite(self) -> bool:
        return all(math.isfinite(x) for c in self for x in (c.real, c.imag))


def pair(c1, c2) -> ComplexPair:
    return ComplexPair(complex(c1), complex(c2))


def bilinear(u: ComplexPair, v: ComplexPair) -> complex:
    """Unconjugated product ``u^T v``."""
    return u.c1 * v.c1 + u.c2 * v.c2


def inner(u: ComplexPair, v: ComplexPair) -> complex:
    """Hermitian inner product ``u^H v``."""
    return u.c1.conjugate() * v.c1 + u.c2.conjugate() * v.c2


@dataclass(frozen=True)
class Hermitian2:
    """2x2 Hermitian matrix ``[[a, b], [conj(b), d]]``.

    Rank-one matrices built by :meth:`outer` remember their factor ``root``
    so quadratic forms against them are evaluated as ``|v^T u|^2`` without
    cancellation.
    """

    a: float
    d: float
    b: complex = 0j
    root: ComplexPair | None = field(default=None, compare=False, repr=False)

    @classmethod
    def zero(cls) -> Hermitian2:
        return cls(0.0, 0.0, 0j)

    @classmethod
    def identity(cls) -> Hermitian2:
        return cls(1.0, 1.0, 0j)

    @classmethod
    def outer(cls, u: ComplexPair) -> Hermitian2:
        """Rank-one ``u u^H``."""
        return cls(abs(u.c1) ** 2, abs(u.c2) ** 2, u.c1 * u.c2.conjugate(), u)

    @classmethod
    def from_array(cls, m) -> Hermitian2:
        return cls(float(m[0][0].real), float(m[1][1].real), complex(m[0][1]))

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - abs(self.b) ** 2

    def is_psd(self, tol: float = PSD_TOL) -> bool:
        """PSD test with a tolerance relative to ``max(1, trace)``."""
        scale = max(1.0, abs(self.trace))
        t = tol * scale
        return self.a >= -t and self.d >= -t and self.det >= -t * scale

    def __add__(self, other: Hermitian2) -> Hermitian2:
        return Hermitian2(self.a + other.a, self.d + other.d, self.b + other.b)

    def __mul__(self, s: float) -> Hermitian2:
        root = self.root.scale(math.sqrt(s)) if self.root is not None and s >= 0 else None
        return Hermitian2(s * self.a, s * self.d, s * self.b, root)

    __rmul__ = __mul__

    def apply(self, v: ComplexPair) -> ComplexPair:
        """Matrix-vector product ``M v``."""
        return ComplexPair(
            self.a * v.c1 + self.b * v.c2,
            self.b.conjugate() * v.c1 + self.d * v.c2,
        )

    def to_array(self):
        import numpy as np

        return np.array([[self.a, self.b], [self.b.conjugate(), self.d]], dtype=complex)

    def is_finite(self) -> bool:
        return all(math.isfinite(x) for x in (self.a, self.d, self.b.real, self.b.imag))


@dataclass(frozen=True)
class EigenPair2:
    lambda_hi: float
    lambda_lo: float
    v_hi: ComplexPair
    v_lo: ComplexPair


def _fix_phase(v: ComplexPair) -> ComplexPair:
    # first nonzero component made real-positive
    lead = v.c1 if v.c1 != 0 else v.c2
    if lead == 0:
        return v
    r = abs(lead)
    rot = lead.conjugate() / r
    out = v.scale(rot)
    if v.c1 != 0:
        return ComplexPair(complex(r, 0.0), out.c2)
    return ComplexPair(0j, complex(r, 0.0))


def _normalized(v: ComplexPair) -> ComplexPair:
    n = v.norm()
    return ComplexPair(v.c1 / n, v.c2 / n)


def herm_eig2(m: Hermitian2, det: float | None = None) -> EigenPair2:
    """Eigendecomposition of a 2x2 Hermitian matrix in closed form.

    Eigenvalues come from ``tr/2 +- sqrt(((a-d)/2)^2 + |b|^2)``; the smaller
    magnitude one is recovered through the determinant to avoid
    cancellation. Callers that know ``det`` in a cancellation-free form may
    pass it. Eigenvectors carry a fixed phase (first nonzero component real
    and positive) so results are reproducible bit for bit.
    """
    a, d, b = m.a, m.d, m.b
    half_tr = 0.5 * (a + d)
    half_diff = 0.5 * (a - d)
    disc = math.hypot(half_diff, abs(b))
    scale = max(abs(a), abs(d), abs(b))

    if disc <= 1e-15 * scale or scale == 0.0:
        # multiple of the identity: any orthonormal pair works
        return EigenPair2(half_tr, half_tr, ComplexPair(1 + 0j, 0j), ComplexPair(0j, 1 + 0j))

    if det is None:
        det = m.det
    if half_tr >= 0:
        lam_hi = half_tr + disc
        lam_lo = det / lam_hi
    else:
        lam_lo = half_tr - disc
        lam_hi = det / lam_lo

    # two algebraically equivalent candidates; keep the better conditioned one
    # entries rescaled to O(1) so tiny or subnormal matrices normalize cleanly
    bs = b / scale
    cand1 = ComplexPair(bs, complex((lam_hi - a) / scale))
    cand2 = ComplexPair(complex((lam_hi - d) / scale), bs.conjugate())
    v = cand1 if cand1.norm_sq() >= cand2.norm_sq() else cand2
    v_hi = _fix_phase(_normalized(v))
    v_lo = _fix_phase(ComplexPair(-v_hi.c2.conjugate(), v_hi.c1.conjugate()))
    return EigenPair2(lam_hi, lam_lo, v_hi, v_lo)


def null_direction(h: ComplexPair, tol: float = 0.0) -> ComplexPair:
    """Unit vector ``u`` with ``h^T u = 0``, namely ``(-h2, h1)/||h||``."""
    n = h.norm()
    if not n > tol:
        raise ZeroChannelError(f"channel norm {n!r} does not exceed tolerance {tol!r}")
    return ComplexPair(-h.c2 / n, h.c1 / n)


def quad_form(s: Hermitian2, v: ComplexPair) -> float:
    """Real scalar ``v^T S v^*``."""
    if s.root is not None:
        return abs(v.c1 * s.root.c1 + v.c2 * s.root.c2) ** 2
    v1, v2 = v
    return (
        s.a * (v1.real * v1.real + v1.imag * v1.imag)
        + s.d * (v2.real * v2.real + v2.imag * v2.imag)
        + 2.0 * (s.b * v1 * v2.conjugate()).real
    )
