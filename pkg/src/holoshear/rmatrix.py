"""2×2 matrices over R_Λ: generators, the Lie algebra basis and trace geometry.

A :class:`Mat2` stores its Re_ℓ and Im_ℓ parts as real ``(2, 2)`` arrays, so
(A + ℓB)(C + ℓD) = (AC − ΛBD) + ℓ(AD + BC) is two real matrix products.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DeterminantError, LambdaMismatchError, NonHyperbolicError
from .ralgebra import Lambda, RNum, extend

__all__ = [
    "Mat2",
    "LieVec",
    "ETA",
    "J_MATRICES",
    "basis",
    "gen_E",
    "gen_L",
    "gen_R",
    "kappa",
    "re_form",
    "im_form",
    "ad",
    "decompose",
    "PairForm",
    "geodesic_length",
    "close_up_to_sign",
]

ETA = np.diag([-1.0, 1.0, 1.0])

J_MATRICES = (
    0.5 * np.array([[0.0, -1.0], [1.0, 0.0]]),
    0.5 * np.array([[1.0, 0.0], [0.0, -1.0]]),
    0.5 * np.array([[0.0, 1.0], [1.0, 0.0]]),
)


class Mat2:
    """2×2 matrix with entries in R_Λ."""

    __slots__ = ("re", "im", "lam")
    __array_ufunc__ = None

    def __init__(self, re, im=None, lam=Lambda.PLUS):
        re = np.array(re, dtype=float)
        if re.shape[-2:] != (2, 2):
            raise ValueError(f"expected a (2, 2) array, got shape {re.shape}")
        self.re = re
        self.im = np.zeros_like(re) if im is None else np.array(im, dtype=float)
        if self.im.shape != re.shape:
            raise ValueError("real and ℓ parts differ in shape")
        self.lam = Lambda.parse(lam)

    @classmethod
    def from_entries(cls, a: RNum, b: RNum, c: RNum, d: RNum) -> "Mat2":
        lam = a.lam
        for e in (b, c, d):
            if e.lam != lam:
                raise LambdaMismatchError("entries must share Λ")
        re = np.array([[a.re, b.re], [c.re, d.re]], dtype=float)
        im = np.array([[a.im, b.im], [c.im, d.im]], dtype=float)
        return cls(re, im, lam)

    @classmethod
    def identity(cls, lam) -> "Mat2":
        return cls(np.eye(2), None, lam)

    @classmethod
    def from_complex(cls, m) -> "Mat2":
        m = np.asarray(m, dtype=complex)
        return cls(m.real, m.imag, Lambda.PLUS)

    def _entry(self, i, j) -> RNum:
        return RNum(self.re[..., i, j], self.im[..., i, j], self.lam)

    a = property(lambda self: self._entry(0, 0))
    b = property(lambda self: self._entry(0, 1))
    c = property(lambda self: self._entry(1, 0))
    d = property(lambda self: self._entry(1, 1))

    def _check(self, other: "Mat2"):
        if other.lam != self.lam:
            raise LambdaMismatchError(
                f"cannot combine Λ={int(self.lam)} with Λ={int(other.lam)}")

    def __matmul__(self, other: "Mat2") -> "Mat2":
        if not isinstance(other, Mat2):
            return NotImplemented
        self._check(other)
        lam = int(self.lam)
        re = self.re @ other.re - lam * (self.im @ other.im)
        im = self.re @ other.im + self.im @ other.re
        return Mat2(re, im, self.lam)

    def __add__(self, other: "Mat2") -> "Mat2":
        if not isinstance(other, Mat2):
            return NotImplemented
        self._check(other)
        return Mat2(self.re + other.re, self.im + other.im, self.lam)

    def __sub__(self, other: "Mat2") -> "Mat2":
        if not isinstance(other, Mat2):
            return NotImplemented
        self._check(other)
        return Mat2(self.re - other.re, self.im - other.im, self.lam)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.re, -self.im, self.lam)

    def scale(self, s) -> "Mat2":
        """Multiply every entry by a scalar in R_Λ (or a real number)."""
        if not isinstance(s, RNum):
            s = RNum(s, 0.0, self.lam)
        if s.lam != self.lam:
            raise LambdaMismatchError("scalar and matrix differ in Λ")
        lam = int(self.lam)
        sr = np.asarray(s.re)[..., None, None]
        si = np.asarray(s.im)[..., None, None]
        return Mat2(sr * self.re - lam * si * self.im, sr * self.im + si * self.re,
                    self.lam)

    def trace(self) -> RNum:
        return RNum(np.trace(self.re, axis1=-2, axis2=-1),
                    np.trace(self.im, axis1=-2, axis2=-1), self.lam)

    def det(self) -> RNum:
        return self.a * self.d - self.b * self.c

    def adjugate(self) -> "Mat2":
        re = np.empty_like(self.re)
        im = np.empty_like(self.im)
        re[..., 0, 0], re[..., 1, 1] = self.re[..., 1, 1], self.re[..., 0, 0]
        im[..., 0, 0], im[..., 1, 1] = self.im[..., 1, 1], self.im[..., 0, 0]
        re[..., 0, 1], re[..., 1, 0] = -self.re[..., 0, 1], -self.re[..., 1, 0]
        im[..., 0, 1], im[..., 1, 0] = -self.im[..., 0, 1], -self.im[..., 1, 0]
        return Mat2(re, im, self.lam)

    def inverse(self) -> "Mat2":
        """Inverse via the adjugate; a zero-divisor determinant raises."""
        return self.adjugate().scale(self.det().inv())

    def traceless_part(self) -> "Mat2":
        half = self.trace() * 0.5
        return self - Mat2.identity(self.lam).scale(half)

    def to_complex(self) -> np.ndarray:
        if self.lam != Lambda.PLUS:
            raise LambdaMismatchError("only Λ=1 matrices are complex")
        return self.re + 1j * self.im

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.re)), np.max(np.abs(self.im))))

    def __repr__(self):
        return f"Mat2(re={self.re.tolist()}, im={self.im.tolist()}, Λ={int(self.lam)})"


def close_up_to_sign(m: Mat2, n: Mat2) -> float:
    """min(‖M − N‖, ‖M + N‖) in the max-entry norm."""
    return min((m - n).max_abs(), (m + n).max_abs())


class LieVec:
    """Traceless matrix written as v0·J₀ + v1·J₁ + v2·J₂ with R_Λ coefficients."""

    __slots__ = ("re", "im", "lam")
    __array_ufunc__ = None

    def __init__(self, re, im=None, lam=Lambda.PLUS):
        self.re = np.array(re, dtype=float).reshape(3)
        self.im = np.zeros(3) if im is None else np.array(im, dtype=float).reshape(3)
        self.lam = Lambda.parse(lam)

    @classmethod
    def from_coefficients(cls, v0: RNum, v1: RNum, v2: RNum) -> "LieVec":
        return cls([v0.re, v1.re, v2.re], [v0.im, v1.im, v2.im], v0.lam)

    v0 = property(lambda self: RNum(self.re[0], self.im[0], self.lam))
    v1 = property(lambda self: RNum(self.re[1], self.im[1], self.lam))
    v2 = property(lambda self: RNum(self.re[2], self.im[2], self.lam))

    def to_matrix(self) -> Mat2:
        re = sum(c * j for c, j in zip(self.re, J_MATRICES))
        im = sum(c * j for c, j in zip(self.im, J_MATRICES))
        return Mat2(re, im, self.lam)

    @classmethod
    def from_matrix(cls, m: Mat2, atol=1e-12) -> "LieVec":
        tr = m.trace()
        if abs(tr.re) > atol or abs(tr.im) > atol:
            raise ValueError("matrix is not traceless")
        # ½[[v1, v2 − v0], [v2 + v0, −v1]]
        def coeffs(x):
            return [x[1, 0] - x[0, 1], x[0, 0] - x[1, 1], x[0, 1] + x[1, 0]]
        return cls(coeffs(m.re), coeffs(m.im), m.lam)

    def __add__(self, other: "LieVec") -> "LieVec":
        if other.lam != self.lam:
            raise LambdaMismatchError("LieVec Λ mismatch")
        return LieVec(self.re + other.re, self.im + other.im, self.lam)

    def __sub__(self, other: "LieVec") -> "LieVec":
        if other.lam != self.lam:
            raise LambdaMismatchError("LieVec Λ mismatch")
        return LieVec(self.re - other.re, self.im - other.im, self.lam)

    def __neg__(self) -> "LieVec":
        return LieVec(-self.re, -self.im, self.lam)

    def scale(self, s) -> "LieVec":
        if not isinstance(s, RNum):
            s = RNum(s, 0.0, self.lam)
        lam = int(self.lam)
        return LieVec(s.re * self.re - lam * s.im * self.im,
                      s.re * self.im + s.im * self.re, self.lam)

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.re)), np.max(np.abs(self.im))))

    def __repr__(self):
        return f"LieVec(re={self.re.tolist()}, im={self.im.tolist()}, Λ={int(self.lam)})"


def basis(i: int, lam, ell: bool = False) -> LieVec:
    """J_i, or P_i = ℓJ_i when ``ell`` is set."""
    v = np.zeros(3)
    v[i] = 1.0
    return LieVec(np.zeros(3), v, lam) if ell else LieVec(v, None, lam)


def _as_matrix(x) -> Mat2:
    return x.to_matrix() if isinstance(x, LieVec) else x


def kappa(x, y) -> RNum:
    """κ(X, Y) = Tr(XY)."""
    return (_as_matrix(x) @ _as_matrix(y)).trace()


def re_form(x, y) -> float:
    """(X, Y) = 2 Re_ℓ κ(X, Y)."""
    return 2.0 * kappa(x, y).re


def im_form(x, y) -> float:
    """⟨X, Y⟩ = 2 Im_ℓ κ(X, Y)."""
    return 2.0 * kappa(x, y).im


def ad(a: Mat2, x):
    """Ad_A X = A X A⁻¹; returns the same kind (LieVec or Mat2) as ``x``."""
    m = a @ _as_matrix(x) @ a.inverse()
    return LieVec.from_matrix(m, atol=1e-8 * (1 + m.max_abs())) if isinstance(x, LieVec) else m


def gen_E(z) -> Mat2:
    """E(z) = diag(e^{z/2}, e^{−z/2})."""
    if not isinstance(z, RNum):
        z = RNum(z, 0.0, Lambda.PLUS)
    half = RNum(0.5 * z.re, 0.5 * z.im, z.lam)
    p = extend("exp", half)
    m = extend("exp", -half)
    zero = RNum(0.0, 0.0, z.lam)
    return Mat2.from_entries(p, zero, zero, m)


def gen_L(lam=Lambda.PLUS) -> Mat2:
    return Mat2([[1.0, 1.0], [0.0, 1.0]], None, lam)


def gen_R(lam=Lambda.PLUS) -> Mat2:
    return Mat2([[1.0, 0.0], [1.0, 1.0]], None, lam)


class PairForm(NamedTuple):
    """Image of a unit-determinant matrix under the Λ-specific splitting.

    ``kind`` is ``"split"`` (pair of real matrices), ``"dual"`` (real matrix
    plus translation LieVec) or ``"complex"`` (``second`` is None).
    """

    kind: str
    first: np.ndarray
    second: object

    def compose(self, other: "PairForm") -> "PairForm":
        """Group law of the target: direct product, semidirect product or ℂ."""
        if self.kind != other.kind:
            raise LambdaMismatchError("pair forms of different kinds")
        if self.kind == "split":
            return PairForm("split", self.first @ other.first, self.second @ other.second)
        if self.kind == "dual":
            a = Mat2(self.first, None, Lambda.ZERO)
            moved = ad(a, other.second)
            return PairForm("dual", self.first @ other.first,
                            LieVec(self.second.re + moved.re, None, Lambda.ZERO))
        return PairForm("complex", self.first @ other.first, None)

    def distance(self, other: "PairForm") -> float:
        d = float(np.max(np.abs(self.first - other.first)))
        if self.kind == "split":
            d = max(d, float(np.max(np.abs(self.second - other.second))))
        elif self.kind == "dual":
            d = max(d, float(np.max(np.abs(self.second.re - other.second.re))))
        return d


def decompose(m: Mat2, atol=1e-9) -> PairForm:
    """Split a unit-determinant matrix according to Λ.

    Λ = −1: (Re + Im, Re − Im), the images under the idempotents e±.
    Λ = 0: (A, X) with M = A + ℓ X A, X the translation part.
    Λ = 1: the complex matrix.
    """
    det = m.det()
    if abs(det.re - 1.0) > atol or abs(det.im) > atol:
        raise DeterminantError(
            f"decompose needs det = 1, got {det.re} + ℓ{det.im}")
    if m.lam == Lambda.MINUS:
        return PairForm("split", m.re + m.im, m.re - m.im)
    if m.lam == Lambda.ZERO:
        a = m.re
        ainv = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]])
        x = Mat2(m.im @ ainv, None, Lambda.ZERO)
        return PairForm("dual", a.copy(), LieVec(LieVec.from_matrix(x, atol=1e-8).re,
                                                 None, Lambda.ZERO))
    return PairForm("complex", m.re + 1j * m.im, None)


def geodesic_length(trace, atol=1e-12) -> float:
    """l = 2 arccosh(|Re_ℓ tr|/2) for a hyperbolic trace."""
    t = abs(trace.re if isinstance(trace, RNum) else float(trace))
    if t < 2.0 - atol:
        raise NonHyperbolicError(f"|trace| = {t} < 2: not hyperbolic")
    return 2.0 * math.acosh(max(t, 2.0) / 2.0)
