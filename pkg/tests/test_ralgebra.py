import cmath
import math

import mpmath
import numpy as np
import pytest

from holoshear.errors import DomainError, LambdaMismatchError, ZeroDivisorError
from holoshear.ralgebra import Lambda, RNum, bloch_wigner, extend, li2, li2_complex, li2_prime

from conftest import LAMBDAS


def rand_r(rng, lam, size=None):
    return RNum(rng.normal(size=size), rng.normal(size=size), lam)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_ell_squared(lam):
    ell = RNum.ell(lam)
    sq = ell * ell
    assert sq == RNum(-int(lam), 0.0, lam)
    assert Lambda.parse(lam).ell_squared == -int(lam)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_ring_axioms(lam, rng):
    for _ in range(20):
        a, b, c = (rand_r(rng, lam) for _ in range(3))
        assert (a * b).allclose(b * a)
        assert ((a * b) * c).allclose(a * (b * c), atol=1e-12)
        assert (a * (b + c)).allclose(a * b + a * c, atol=1e-12)
        assert (a * a.inv()).allclose(RNum.one(lam), atol=1e-10)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_norm_is_multiplicative(lam, rng):
    a, b = rand_r(rng, lam), rand_r(rng, lam)
    assert math.isclose((a * b).norm(), a.norm() * b.norm(), rel_tol=1e-12, abs_tol=1e-12)


def test_zero_divisors():
    with pytest.raises(ZeroDivisorError):
        RNum(1.0, 1.0, -1).inv()
    with pytest.raises(ZeroDivisorError):
        RNum(0.0, 2.0, 0).inv()
    with pytest.raises(ZeroDivisorError):
        RNum(0.0, 0.0, 1).inv()
    # split-complex (1, 1) · (1, −1) = 0
    assert RNum(1.0, 1.0, -1) * RNum(1.0, -1.0, -1) == RNum(0.0, 0.0, -1)


def test_mixing_lambdas_is_an_error():
    with pytest.raises(LambdaMismatchError):
        RNum(1, 1, 0) + RNum(1, 1, 1)
    with pytest.raises(LambdaMismatchError):
        RNum(1, 1, 0) + 1j


def test_parse():
    assert Lambda.parse("split") is Lambda.MINUS
    assert Lambda.parse("-1") is Lambda.MINUS
    assert Lambda.parse(0) is Lambda.ZERO
    for bad in (2, "q", True):
        with pytest.raises(ValueError):
            Lambda.parse(bad)


def test_complex_case_matches_python_complex(rng):
    for _ in range(10):
        a, b = rand_r(rng, 1), rand_r(rng, 1)
        assert cmath.isclose((a * b).to_complex(), a.to_complex() * b.to_complex())
        z = RNum(rng.normal(), rng.uniform(-3, 3), 1)
        assert cmath.isclose(extend("exp", z).to_complex(), cmath.exp(z.to_complex()))
        assert cmath.isclose(extend("log", z).to_complex(), cmath.log(z.to_complex()))


def test_split_case_uses_idempotents():
    z = RNum(0.3, 0.7, -1)
    e = extend("exp", z)
    assert math.isclose(e.re + e.im, math.exp(1.0))
    assert math.isclose(e.re - e.im, math.exp(-0.4))


def test_dual_case_is_first_jet():
    z = RNum(0.3, 0.7, 0)
    e = extend("exp", z)
    assert math.isclose(e.re, math.exp(0.3))
    assert math.isclose(e.im, 0.7 * math.exp(0.3))
    lg = extend("li2", RNum(-0.4, 2.0, 0))
    assert math.isclose(lg.im, 2.0 * float(mpmath.log(1.4) / 0.4), rel_tol=1e-14)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_exp_log_and_homomorphism(lam, rng):
    for _ in range(10):
        a = RNum(rng.uniform(-2, 2), rng.uniform(-1, 1), lam)
        b = RNum(rng.uniform(-2, 2), rng.uniform(-1, 1), lam)
        assert (extend("exp", a + b)).allclose(extend("exp", a) * extend("exp", b), atol=1e-12)
        assert extend("log", extend("exp", a)).allclose(a, atol=1e-12)


def test_extend_is_vectorized():
    z = RNum(np.array([0.1, 0.2]), np.array([0.3, -0.1]), -1)
    out = extend("exp", z)
    assert out.shape == (2,)
    assert out[1].allclose(extend("exp", z[1]))


def test_domain_errors_name_the_part():
    with pytest.raises(DomainError) as info:
        extend("log", RNum(0.5, 1.0, -1))
    assert info.value.part == "re-im"
    with pytest.raises(DomainError) as info:
        extend("log", RNum(-1.0, 1.0, 0))
    assert info.value.part == "re"
    with pytest.raises(DomainError):
        extend("log", RNum(0.0, 0.0, 1))
    with pytest.raises(ValueError):
        extend("sin", RNum(0.0, 0.0, 1))


def test_principal_log_branch():
    # on the negative real axis the branch gives +iπ
    assert math.isclose(extend("log", RNum(-1.0, 0.0, 1)).im, math.pi)
    assert math.isclose(extend("log", RNum(-1.0, -0.0, 1)).im, math.pi)


GRID = [-1e6, -50.0, -7.3, -1.0, -0.75, -0.5, -0.2, 0.0, 1e-9, 0.3, 0.5, 0.77, 0.999, 1.0]


@pytest.mark.parametrize("t", GRID)
def test_li2_against_mpmath(t):
    ref = float(mpmath.polylog(2, t))
    assert math.isclose(li2(t), ref, rel_tol=2e-15, abs_tol=2e-15)


def test_li2_known_values():
    # Li₂(1/2) = π²/12 − log²2/2, Li₂(−1) = −π²/12
    assert math.isclose(li2(0.5), math.pi ** 2 / 12 - math.log(2) ** 2 / 2, rel_tol=1e-15)
    assert math.isclose(li2(-1.0), -math.pi ** 2 / 12, rel_tol=1e-15)


def test_li2_domain_and_derivative():
    with pytest.raises(DomainError):
        li2(1.5)
    for t in (-3.0, -0.2, 0.4):
        h = 1e-5
        fd = (li2(t + h) - li2(t - h)) / (2 * h)
        assert math.isclose(li2_prime(t), fd, rel_tol=1e-8)
    assert li2_prime(0.0) == 1.0


def test_li2_complex_against_mpmath(rng):
    pts = [complex(*rng.normal(scale=3, size=2)) for _ in range(40)]
    pts += [0.5 + 0.5j, -1 + 1e-3j, 2 - 1e-12j, 1j, -7 - 0.1j, 0.999 + 0.01j]
    for z in pts:
        ref = complex(mpmath.polylog(2, z))
        assert abs(li2_complex(z) - ref) <= 1e-14 * max(1.0, abs(ref)), z


def test_bloch_wigner():
    # maximum at e^{iπ/3}: volume of the regular ideal tetrahedron
    assert math.isclose(bloch_wigner(cmath.exp(1j * math.pi / 3)), 1.0149416064096536, rel_tol=1e-14)
    z = 0.3 + 1.7j
    ref = float(mpmath.im(mpmath.polylog(2, z)) + mpmath.log(abs(z)) * mpmath.arg(1 - z))
    assert math.isclose(bloch_wigner(z), ref, rel_tol=1e-13)
    # five-term symmetries D(z) = −D(z̄) = D(1 − 1/z)
    assert math.isclose(bloch_wigner(z.conjugate()), -ref, rel_tol=1e-13)
    assert math.isclose(bloch_wigner(1 - 1 / z), ref, rel_tol=1e-12)
    assert bloch_wigner(0.3) == 0.0
    with pytest.raises(DomainError):
        bloch_wigner(1.0)
