"""Arithmetic and analytic calculus in the algebra R_Λ.

R_Λ is the real algebra spanned by 1 and ℓ with ℓ² = −Λ.  Λ = 1 gives the
complex numbers, Λ = 0 the dual numbers and Λ = −1 the split-complex
numbers.  An :class:`RNum` may hold numpy arrays in both parts; every
operation then acts elementwise.
"""

from __future__ import annotations

import cmath
import enum
import math
from fractions import Fraction
from math import comb

import numpy as np

from .errors import DomainError, LambdaMismatchError, ZeroDivisorError

__all__ = [
    "Lambda",
    "RNum",
    "mul",
    "inv",
    "extend",
    "li2",
    "li2_complex",
    "bloch_wigner",
    "FUNCTIONS",
]

PI2_6 = math.pi ** 2 / 6


class Lambda(enum.IntEnum):
    """Sign of the curvature; selects the algebra."""

    MINUS = -1
    ZERO = 0
    PLUS = 1

    @classmethod
    def parse(cls, value) -> "Lambda":
        if isinstance(value, Lambda):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            names = {"minus": -1, "split": -1, "zero": 0, "dual": 0,
                     "plus": 1, "complex": 1}
            if key in names:
                return cls(names[key])
            try:
                value = int(key)
            except ValueError:
                raise ValueError(f"unknown lambda {value!r}") from None
        if isinstance(value, (bool, np.bool_)):
            raise ValueError("lambda must be -1, 0 or 1")
        try:
            return cls(int(value))
        except ValueError:
            raise ValueError(f"lambda must be -1, 0 or 1, got {value!r}") from None

    @property
    def ell_squared(self) -> int:
        return -int(self)


def _part(v):
    if isinstance(v, np.ndarray):
        return v.astype(float, copy=False)
    if isinstance(v, (list, tuple)):
        return np.asarray(v, dtype=float)
    return float(v)


class RNum:
    """Element x + ℓy of R_Λ (or an array of such elements)."""

    __slots__ = ("re", "im", "lam")
    __array_ufunc__ = None

    def __init__(self, re=0.0, im=0.0, lam=Lambda.PLUS):
        self.re = _part(re)
        self.im = _part(im)
        self.lam = Lambda.parse(lam)

    # constructors
    @classmethod
    def one(cls, lam) -> "RNum":
        return cls(1.0, 0.0, lam)

    @classmethod
    def zero(cls, lam) -> "RNum":
        return cls(0.0, 0.0, lam)

    @classmethod
    def ell(cls, lam) -> "RNum":
        return cls(0.0, 1.0, lam)

    @classmethod
    def from_complex(cls, z) -> "RNum":
        z = np.asarray(z, dtype=complex)
        if z.ndim == 0:
            z = complex(z)
            return cls(z.real, z.imag, Lambda.PLUS)
        return cls(z.real, z.imag, Lambda.PLUS)

    # helpers
    def _coerce(self, other) -> "RNum":
        if isinstance(other, RNum):
            if other.lam != self.lam:
                raise LambdaMismatchError(
                    f"cannot combine Λ={int(self.lam)} with Λ={int(other.lam)}")
            return other
        if isinstance(other, (complex, np.complexfloating)):
            if self.lam != Lambda.PLUS:
                raise LambdaMismatchError("complex scalars only mix with Λ=1")
            return RNum(other.real, other.imag, self.lam)
        if isinstance(other, (int, float, np.integer, np.floating, np.ndarray)):
            return RNum(other, 0.0, self.lam)
        return NotImplemented

    def norm(self):
        """N(z) = re² + Λ·im²."""
        return self.re * self.re + int(self.lam) * self.im * self.im

    def conj(self) -> "RNum":
        return RNum(self.re, -self.im, self.lam)

    def is_invertible(self) -> bool:
        return bool(np.all(self.norm() != 0))

    def inv(self) -> "RNum":
        return inv(self)

    def to_complex(self):
        if self.lam != Lambda.PLUS:
            raise LambdaMismatchError("only Λ=1 elements are complex numbers")
        return self.re + 1j * self.im

    def projections(self):
        """Components (re+im, re−im) along the idempotents ½(1±ℓ), Λ=−1 only."""
        if self.lam != Lambda.MINUS:
            raise LambdaMismatchError("idempotent splitting needs Λ=−1")
        return self.re + self.im, self.re - self.im

    @property
    def shape(self):
        return np.shape(self.re)

    def __getitem__(self, idx) -> "RNum":
        return RNum(np.asarray(self.re)[idx], np.asarray(self.im)[idx], self.lam)

    def __len__(self):
        return len(self.re)

    def allclose(self, other, atol=1e-12, rtol=0.0) -> bool:
        other = self._coerce(other)
        return bool(np.allclose(self.re, other.re, atol=atol, rtol=rtol)
                    and np.allclose(self.im, other.im, atol=atol, rtol=rtol))

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RNum(self.re + o.re, self.im + o.im, self.lam)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RNum(self.re - o.re, self.im - o.im, self.lam)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return RNum(-self.re, -self.im, self.lam)

    def __pos__(self):
        return self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return mul(self, inv(o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return mul(o, inv(self))

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except LambdaMismatchError:
            return False
        if o is NotImplemented:
            return o
        return bool(np.all(self.re == o.re) and np.all(self.im == o.im))

    __hash__ = None

    def __repr__(self):
        return f"RNum({self.re!r}, {self.im!r}, Λ={int(self.lam)})"


def mul(a: RNum, b: RNum) -> RNum:
    """(x, y)·(u, v) = (xu − Λyv, xv + yu)."""
    if a.lam != b.lam:
        raise LambdaMismatchError(
            f"cannot multiply Λ={int(a.lam)} by Λ={int(b.lam)}")
    lam = int(a.lam)
    return RNum(a.re * b.re - lam * a.im * b.im, a.re * b.im + a.im * b.re, a.lam)


def inv(a: RNum) -> RNum:
    """Multiplicative inverse (re, −im)/N; zero divisors raise."""
    n = a.norm()
    if np.any(n == 0):
        raise ZeroDivisorError(
            f"{a!r} has zero norm and is not invertible in R_Λ")
    return RNum(a.re / n, -a.im / n, a.lam)


# ---------------------------------------------------------------------------
# dilogarithm


def _li2_series(t: float) -> float:
    # Σ tᵏ/k², only called with |t| ≤ 0.5
    total = 0.0
    power = t
    k = 1
    while True:
        term = power / (k * k)
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            return total
        k += 1
        power *= t


def _li2_scalar(t: float) -> float:
    if math.isnan(t):
        raise DomainError("li2 of NaN", part="argument")
    if t > 1.0:
        raise DomainError(f"li2 is real only for t ≤ 1, got {t}", part="argument")
    if t == 1.0:
        return PI2_6
    if t < -1.0:
        if math.isinf(t):
            return -math.inf
        lg = math.log(-t)
        return -PI2_6 - 0.5 * lg * lg - _li2_scalar(1.0 / t)
    if t < -0.5:
        # Landen: Li₂(t) + Li₂(t/(t−1)) = −½ log²(1−t)
        lg = math.log1p(-t)
        return -_li2_series(t / (t - 1.0)) - 0.5 * lg * lg
    if t <= 0.5:
        return _li2_series(t)
    # reflection: Li₂(t) + Li₂(1−t) = π²/6 − log t · log(1−t)
    return PI2_6 - math.log(t) * math.log1p(-t) - _li2_series(1.0 - t)


def li2(t):
    """Euler's dilogarithm on the real half-line t ≤ 1."""
    if np.ndim(t) == 0:
        return _li2_scalar(float(t))
    arr = np.asarray(t, dtype=float)
    return np.vectorize(_li2_scalar, otypes=[float])(arr)


def li2_prime(t):
    """Li₂′(t) = −log(1−t)/t, with value 1 at t = 0."""
    def one(s):
        if s >= 1.0:
            raise DomainError(f"Li₂′ is singular at t={s}", part="argument")
        return 1.0 if s == 0.0 else -math.log1p(-s) / s
    if np.ndim(t) == 0:
        return one(float(t))
    return np.vectorize(one, otypes=[float])(np.asarray(t, dtype=float))


def _bernoulli(n):
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(comb(m + 1, k) * b[k] for k in range(m)) / (m + 1))
    return b


# coefficients B_n/(n+1)! of Li₂(z) = Σ B_n wⁿ⁺¹/(n+1)!, w = −log(1−z)
_BERN = [float(bn / math.factorial(n + 1)) for n, bn in enumerate(_bernoulli(40))]


def _li2_bernoulli(z: complex) -> complex:
    w = -cmath.log(1 - z)
    w2 = w * w
    # B_0 and B_1 terms, then even indices only
    total = w - 0.25 * w2
    power = w * w2
    for n in range(2, 41, 2):
        term = _BERN[n] * power
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
        power *= w2
    return total


def _li2_complex_scalar(z: complex) -> complex:
    if z.imag == 0.0:
        if z.real > 1.0:
            raise DomainError(
                f"li2 branch cut [1, ∞) hit at {z.real}", part="argument")
        return complex(_li2_scalar(z.real), 0.0)
    if abs(z) > 1.0:
        lg = cmath.log(-z)
        return -PI2_6 - 0.5 * lg * lg - _li2_complex_scalar(1.0 / z)
    if z.real > 0.5:
        return (PI2_6 - cmath.log(z) * cmath.log(1 - z)
                - _li2_complex_scalar(1 - z))
    return _li2_bernoulli(z)


def li2_complex(z):
    """Principal branch of Li₂ on ℂ, cut along [1, ∞)."""
    if np.ndim(z) == 0:
        return _li2_complex_scalar(complex(z))
    return np.vectorize(_li2_complex_scalar, otypes=[complex])(
        np.asarray(z, dtype=complex))


def bloch_wigner(z) -> float:
    """D(z) = Im Li₂(z) + log|z|·arg(1−z) for z off {0, 1}."""
    if isinstance(z, RNum):
        z = z.to_complex()
    z = complex(z)
    if z == 0 or z == 1:
        raise DomainError(f"Bloch–Wigner function is singular at {z}",
                          part="argument")
    if z.imag == 0.0:
        return 0.0
    return _li2_complex_scalar(z).imag + math.log(abs(z)) * cmath.phase(1 - z)


# ---------------------------------------------------------------------------
# analytic extension


def _real_log(t):
    return np.log(t) if isinstance(t, np.ndarray) else math.log(t)


def _real_exp(t):
    return np.exp(t) if isinstance(t, np.ndarray) else math.exp(t)


def _complex_log(w):
    w = np.asarray(w, dtype=complex)
    out = np.log(w.real + 1j * (w.imag + 0.0))
    return out if out.ndim else complex(out)


# name -> (f, f′, real domain test, complex f)
FUNCTIONS = {
    "exp": (_real_exp, _real_exp, lambda t: np.isfinite(t),
            lambda w: np.exp(w)),
    "log": (_real_log, lambda t: 1.0 / t, lambda t: t > 0, _complex_log),
    "li2": (li2, li2_prime, lambda t: t <= 1, li2_complex),
}


def _check(ok, msg, part):
    if not np.all(ok):
        raise DomainError(msg, part=part)


def extend(f, z: RNum) -> RNum:
    """Extension of a real-analytic function to R_Λ.

    Λ = −1 uses the idempotent split ½(1+ℓ)f(x+y) + ½(1−ℓ)f(x−y), Λ = 0 the
    first-order jet f(x) + ℓf′(x)y, and Λ = 1 the principal complex branch.
    ``f`` is one of ``"exp"``, ``"log"``, ``"li2"``.
    """
    name = f if isinstance(f, str) else getattr(f, "__name__", str(f))
    if name not in FUNCTIONS:
        raise ValueError(f"unsupported function {name!r}; choose from {sorted(FUNCTIONS)}")
    real_f, real_df, in_domain, complex_f = FUNCTIONS[name]
    lam = z.lam
    if lam == Lambda.MINUS:
        p = z.re + z.im
        m = z.re - z.im
        _check(in_domain(p), f"{name}: re+im = {p} outside real domain", "re+im")
        _check(in_domain(m), f"{name}: re−im = {m} outside real domain", "re-im")
        fp, fm = real_f(p), real_f(m)
        return RNum(0.5 * (fp + fm), 0.5 * (fp - fm), lam)
    if lam == Lambda.ZERO:
        x = z.re
        _check(in_domain(x), f"{name}: re = {x} outside real domain", "re")
        if name == "li2":
            _check(np.asarray(x) < 1, "li2: derivative singular at re = 1", "re")
        return RNum(real_f(x), real_df(x) * z.im, lam)
    w = z.re + 1j * z.im
    if name == "log":
        _check(np.asarray(w) != 0, "log: argument is 0", "argument")
    if name == "li2":
        bad = (np.asarray(z.im) == 0) & (np.asarray(z.re) > 1)
        _check(~bad, "li2: argument on the branch cut [1, ∞)", "argument")
    out = complex_f(w)
    if np.ndim(out) == 0:
        out = complex(out)
        return RNum(out.real, out.imag, lam)
    return RNum(np.real(out), np.imag(out), lam)
