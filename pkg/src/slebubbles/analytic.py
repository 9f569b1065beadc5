"""Closed-form side: special functions, densities, the criterion F and its root.

Special functions (log-gamma, digamma, zeta, regularized incomplete beta) are
implemented here directly; the test suite checks them against scipy/mpmath.
Quadrature is delegated to ``scipy.integrate.quad`` (QUADPACK, Gauss-Kronrod).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

EULER_GAMMA = 0.57721566490153286061


class DomainError(ValueError):
    """Argument outside the domain of an analytic formula."""


class ConvergenceError(ArithmeticError):
    """A series did not reach its accuracy target within the term budget."""


def _check_kappa(kappa: float) -> None:
    if not 4.0 < kappa < 8.0:
        raise DomainError(f"kappa must lie in (4, 8), got {kappa!r}")


# --------------------------------------------------------------------------
# Gamma family
# --------------------------------------------------------------------------

# Lanczos coefficients, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _is_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def log_gamma(x: float) -> float:
    """log|Gamma(x)| via the Lanczos approximation (reflection for x < 1/2)."""
    if _is_pole(x):
        raise DomainError(f"Gamma has a pole at {x!r}")
    if x < 0.5:
        return math.log(math.pi / abs(math.sin(math.pi * x))) - log_gamma(1.0 - x)
    x -= 1.0
    acc = _LANCZOS[0]
    for k, c in enumerate(_LANCZOS[1:], start=1):
        acc += c / (x + k)
    t = x + _LANCZOS_G + 0.5
    return 0.5 * math.log(2 * math.pi) + (x + 0.5) * math.log(t) - t + math.log(acc)


def gamma_sign(x: float) -> float:
    if _is_pole(x):
        raise DomainError(f"Gamma has a pole at {x!r}")
    if x > 0:
        return 1.0
    # Gamma alternates sign between consecutive negative integers
    return -1.0 if math.floor(x) % 2 else 1.0


def gamma(x: float) -> float:
    return gamma_sign(x) * math.exp(log_gamma(x))


def log_beta(p: float, q: float) -> float:
    return log_gamma(p) + log_gamma(q) - log_gamma(p + q)


def beta(p: float, q: float) -> float:
    return math.exp(log_beta(p, q))


# Bernoulli numbers B_2 .. B_16
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)


def digamma(x: float) -> float:
    """psi(x) = Gamma'(x)/Gamma(x).

    Negative arguments use the reflection psi(x) = psi(1-x) - pi*cot(pi*x);
    positive ones are shifted up to x >= 6 by the recurrence and finished with
    the asymptotic series.
    """
    if _is_pole(x):
        raise DomainError(f"digamma has a pole at {x!r}")
    if x < 0:
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 6.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for k, b in enumerate(_BERNOULLI, start=1):
        series += b / (2 * k) * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - series


def zeta(s: float, terms: int = 10) -> float:
    """Riemann zeta on (1, 2] by Euler-Maclaurin summation.

    ``terms`` explicit terms are summed before the integral tail and the
    Bernoulli corrections; 10 already gives full double precision.
    """
    if not 1.0 < s <= 2.0:
        raise DomainError(f"zeta implemented on (1, 2], got {s!r}")
    N = terms
    head = math.fsum(k ** -s for k in range(1, N))
    tail = N ** (1.0 - s) / (s - 1.0) + 0.5 * N ** -s
    # sum_j B_2j/(2j)! * s(s+1)...(s+2j-2) N^(-s-2j+1)
    rising = s
    fact = 2.0
    for j, b in enumerate(_BERNOULLI, start=1):
        tail += b / fact * rising * N ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return head + tail


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) by Lentz's continued fraction."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return x
    if x > (a + 1.0) / (a + b + 2.0):
        return 1.0 - betainc_reg(b, a, 1.0 - x)
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)) / a
    tiny = 1e-300
    f = c = 1.0
    d = 1.0 - (a + b) * x / (a + 1.0)
    d = 1.0 / (d if abs(d) > tiny else tiny)
    f = d
    for m in range(1, 500):
        for num in (
            m * (b - m) * x / ((a + 2 * m - 1) * (a + 2 * m)),
            -(a + m) * (a + b + m) * x / ((a + 2 * m) * (a + 2 * m + 1)),
        ):
            d = 1.0 + num * d
            d = 1.0 / (d if abs(d) > tiny else tiny)
            c = 1.0 + num / c
            c = c if abs(c) > tiny else tiny
            f *= c * d
        if abs(c * d - 1.0) < 1e-16:
            break
    return front * f


# --------------------------------------------------------------------------
# Criterion F and its root
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CriterionValue:
    kappa: float
    cot_term: float
    digamma_term: float
    total: float


def overshoot_log_mean(kappa: float) -> float:
    """E log(R_{tau-} - R_xi) in closed form: pi * cot(pi kappa / 4)."""
    _check_kappa(kappa)
    # cot has period pi, so evaluate at the reduced angle
    return math.pi / math.tan(math.pi * (kappa / 4.0 - 1.0))


def expected_log_arcsine(kappa: float) -> float:
    _check_kappa(kappa)
    return digamma(2.0 - kappa / 4.0) - digamma(1.0)


def criterion_F(kappa: float) -> CriterionValue:
    cot_term = overshoot_log_mean(kappa)
    dig = expected_log_arcsine(kappa)
    return CriterionValue(kappa, cot_term, dig, cot_term + dig)


def find_kappa0(tol: float = 1e-12) -> float:
    """Root of F on (4, 8) by bisection; F is strictly decreasing there."""
    if tol < 1e-12:
        raise DomainError("tol below 1e-12 is not supported")
    lo, hi = 4.0 + 1e-9, 8.0 - 1e-9
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if criterion_F(mid).total > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# Densities
# --------------------------------------------------------------------------


def overshoot_density(w: float, kappa: float) -> float:
    """Density of R_{tau-} - R_xi at w > 0."""
    _check_kappa(kappa)
    if w <= 0:
        raise DomainError("overshoot density is supported on w > 0")
    a = kappa / 4.0
    return -math.sin(math.pi * a) / math.pi * w ** (1.0 - a) / (1.0 + w)


def _half_line_quad(with_log: bool, kappa: float) -> float:
    """int_0^inf [log w] * overshoot_density(w) dw.

    Split at w = 1 and fold (1, inf) onto (0, 1) with w = 1/x; both pieces then
    carry an algebraic(-log) endpoint singularity that QUADPACK integrates with
    an exact weight function.
    """
    a = kappa / 4.0
    const = -math.sin(math.pi * a) / math.pi
    weight = "alg-loga" if with_log else "alg"
    sign = -1.0 if with_log else 1.0
    f = lambda x: 1.0 / (1.0 + x)  # noqa: E731
    near, _ = integrate.quad(f, 0.0, 1.0, weight=weight, wvar=(1.0 - a, 0.0),
                             epsabs=1e-14, epsrel=1e-13)
    far, _ = integrate.quad(f, 0.0, 1.0, weight=weight, wvar=(a - 2.0, 0.0),
                            epsabs=1e-14, epsrel=1e-13)
    return const * (near + sign * far)


def overshoot_mass(kappa: float) -> float:
    _check_kappa(kappa)
    return _half_line_quad(False, kappa)


def overshoot_log_mean_quad(kappa: float) -> float:
    _check_kappa(kappa)
    return _half_line_quad(True, kappa)


def arcsine_density(x: float, kappa: float) -> float:
    """Generalized arcsine law: Beta(2 - kappa/4, kappa/4 - 1) density."""
    _check_kappa(kappa)
    if not 0.0 < x < 1.0:
        raise DomainError("arcsine density is supported on (0, 1)")
    a = kappa / 4.0
    return math.sin(math.pi * (2.0 - a)) / math.pi * x ** (1.0 - a) * (1.0 - x) ** (a - 2.0)


def arcsine_cdf(x: float, kappa: float) -> float:
    _check_kappa(kappa)
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    a = kappa / 4.0
    return betainc_reg(2.0 - a, a - 1.0, x)


def arcsine_log_mean_quad(kappa: float) -> float:
    _check_kappa(kappa)
    a = kappa / 4.0
    # log x * x^(1-a) handled by the weight; (1-x)^(a-2) split off at 1/2
    const = math.sin(math.pi * (2.0 - a)) / math.pi
    left, _ = integrate.quad(lambda x: (1.0 - x) ** (a - 2.0), 0.0, 0.5, weight="alg-loga",
                             wvar=(1.0 - a, 0.0), epsabs=1e-14, epsrel=1e-13)
    right, _ = integrate.quad(lambda x: math.log(x) * x ** (1.0 - a), 0.5, 1.0, weight="alg",
                              wvar=(0.0, a - 2.0), epsabs=1e-14, epsrel=1e-13)
    return const * (left + right)


def joint_density_dk(u: float, v: float, y: float, kappa: float) -> float:
    """Joint density of (-1 - R_tau, R_{tau-} + 1, R_xi + 1) at (u, v, y)."""
    _check_kappa(kappa)
    if not (u > 0 and 0.0 <= y < 1.0 and v >= y):
        raise DomainError("support is u > 0, 0 <= y < 1, v >= y")
    a = kappa / 4.0
    return (a * (1 - a) * math.sin(math.pi * a) / math.pi
            * (1.0 - y) ** (a - 2.0) / (v + u) ** (a + 1.0))


def overshoot_level_density(w: float, y: float, kappa: float) -> float:
    """Joint density of (R_{tau-} - R_xi, R_xi + 1) after integrating out the undershoot."""
    a = kappa / 4.0
    return (1 - a) * math.sin(math.pi * a) / math.pi * (1.0 - y) ** (a - 2.0) / (y + w) ** a


def criterion_closure_gap(kappa: float) -> float:
    """|F(kappa) - (quadrature of E log overshoot + E log arcsine)|."""
    lhs = criterion_F(kappa).total
    return abs(lhs - (overshoot_log_mean_quad(kappa) + expected_log_arcsine(kappa)))


# --------------------------------------------------------------------------
# Moments and first-passage laws
# --------------------------------------------------------------------------


def abs_moment_L1(r: float, kappa: float) -> float:
    """E|L_1|^r as given by the literature formula Gamma(1-4r/k)/Gamma(1-r) (-cos(pi k/8))^(-r+4r/k).

    Only validated for 0 < r < 1; at r = 1 the expression hits the pole of
    Gamma(1 - r).  See :func:`abs_moment_L1_chf` for a direct evaluation.
    """
    _check_kappa(kappa)
    if not 0.0 < r < 1.0:
        raise DomainError("abs_moment_L1 is only defined here for 0 < r < 1")
    return (gamma(1.0 - 4.0 * r / kappa) / gamma(1.0 - r)
            * (-math.cos(math.pi * kappa / 8.0)) ** (-r + 4.0 * r / kappa))


def abs_moment_L1_chf(r: float, kappa: float) -> float:
    """E|L_1|^r computed from the characteristic function e^{(i lam)^(kappa/4)}.

    Uses E|X|^r = (2/pi) Gamma(r+1) sin(pi r/2) int_0^inf (1 - Re phi(t)) t^(-r-1) dt.
    """
    _check_kappa(kappa)
    if not 0.0 < r < kappa / 4.0:
        raise DomainError("need 0 < r < kappa/4")
    a = kappa / 4.0
    ca, sa = math.cos(math.pi * a / 2), math.sin(math.pi * a / 2)

    def f(t: float) -> float:
        ta = t ** a
        return -math.expm1(ta * ca) * math.cos(ta * sa) * t ** (-r - 1) + (
            1.0 - math.cos(ta * sa)) * t ** (-r - 1)

    v1, _ = integrate.quad(f, 0.0, 1.0, limit=400, epsabs=1e-13)
    v2, _ = integrate.quad(f, 1.0, np.inf, limit=400, epsabs=1e-13)
    return 2.0 / math.pi * gamma(r + 1.0) * math.sin(math.pi * r / 2.0) * (v1 + v2)


def abs_moment_L1_closed(r: float, kappa: float) -> float:
    """Closed form for the Laplace-normalized law: Gamma(1-r/a) cos(r(pi/a - pi/2)) / (Gamma(1-r) cos(pi r/2))."""
    _check_kappa(kappa)
    if not 0.0 < r < 1.0:
        raise DomainError("need 0 < r < 1")
    a = kappa / 4.0
    return (gamma(1.0 - r / a) * math.cos(r * (math.pi / a - math.pi / 2))
            / (gamma(1.0 - r) * math.cos(math.pi * r / 2)))


class SeriesValue(NamedTuple):
    value: float
    error: float
    terms: int


def _fpt_terms(t: float, kappa: float, terms: int):
    a4 = 4.0 / kappa
    s = math.sin(math.pi * a4)
    for n in range(1, terms + 1):
        # first family: (-1)^(n-1) sin(4pi/k) Gamma(n-4/k)/Gamma(nk/4-1) t^-(n-1)
        lg1 = log_gamma(n - a4) - log_gamma(n * kappa / 4.0 - 1.0) - (n - 1) * math.log(t)
        first = (-1) ** (n - 1) * s * gamma_sign(n * kappa / 4.0 - 1.0) * math.exp(lg1)
        # second family: -sin(4 n pi/k) Gamma(1+4n/k)/n! t^-(4(n+1)/k - 1)
        lg2 = log_gamma(1.0 + a4 * n) - log_gamma(n + 1.0) - (a4 * (n + 1) - 1.0) * math.log(t)
        second = -math.sin(a4 * n * math.pi) * math.exp(lg2)
        yield first, second


def fpt_density_series(t: float, kappa: float, terms: int = 60,
                       tail_tol: float = 1e-8) -> SeriesValue:
    """Series for the density f_tau(t) quoted alongside the moment bound.

    The two term families are summed separately (``math.fsum``); summation stops
    once the latest term of both families is below ``tail_tol`` relative to the
    running sums.  Raises :class:`ConvergenceError` if the remaining-term
    estimate exceeds 1e-6 when the budget runs out.
    """
    _check_kappa(kappa)
    if t <= 0:
        raise DomainError("t must be positive")
    if terms < 10:
        raise DomainError("need at least 10 terms")
    firsts: list[float] = []
    seconds: list[float] = []
    err = math.inf
    used = 0
    for used, (a_term, b_term) in enumerate(_fpt_terms(t, kappa, terms), start=1):
        firsts.append(a_term)
        seconds.append(b_term)
        if used >= 10:
            scale = max(abs(math.fsum(firsts)), abs(math.fsum(seconds)), 1e-300)
            err = (abs(a_term) + abs(b_term)) / scale
            if err < tail_tol:
                break
    pref = 1.0 / (math.pi * t ** (2.0 - 4.0 / kappa))
    value = pref * (math.fsum(firsts) + math.fsum(seconds))
    abs_err = pref * (abs(firsts[-1]) + abs(seconds[-1]))
    if abs_err > 1e-6 and err > tail_tol:
        raise ConvergenceError(f"fpt series at t={t} not converged: tail ~ {abs_err:.3g}")
    return SeriesValue(value, abs_err, used)


def fpt_series_mass(a: float, b: float, kappa: float) -> float:
    """Integral of the series density over [a, b] (b may be inf)."""
    val, _ = integrate.quad(lambda t: fpt_density_series(t, kappa).value, a, b,
                            limit=400, epsabs=1e-11)
    return val


def _mittag_leffler(al: float, be: float, z: float, tol: float = 1e-17) -> float:
    total, j = 0.0, 0
    while True:
        term = math.exp(j * math.log(z) - log_gamma(al * j + be)) if z > 0 else (1.0 if j == 0 else 0.0)
        total += term
        if j > 5 and term < tol * abs(total):
            return total
        j += 1


def first_passage_laplace(q: float, kappa: float) -> float:
    """E exp(-q tau) for tau = first time L drops strictly below -1 (scale functions).

    With Laplace exponent lam^a the q-scale function is W(x) = x^(a-1) E_{a,a}(q x^a)
    and Z(x) = E_{a,1}(q x^a); E e^{-q tau} = Z(1) - q^(1-1/a) W(1).
    """
    a = kappa / 4.0
    return _mittag_leffler(a, 1.0, q) - q ** (1.0 - 1.0 / a) * _mittag_leffler(a, a, q)


def point_hitting_laplace(q: float, kappa: float) -> float:
    """E exp(-q T) for T = first time L equals -1 exactly (resolvent-density ratio)."""
    a = kappa / 4.0
    return math.exp(q ** (1.0 / a)) - a * q ** (1.0 - 1.0 / a) * _mittag_leffler(a, a, q)


def laplace_cdf(laplace: Callable[[float, float], float], t: float, kappa: float) -> float:
    """P(T <= t) by Talbot inversion of laplace(q)/q (mpmath)."""
    import mpmath as mp

    def F(q):
        qf = complex(q)
        return _complex_laplace(laplace, qf, kappa) / qf

    return float(mp.invertlaplace(F, t, method="talbot").real)


def _complex_laplace(laplace, q: complex, kappa: float) -> complex:
    import mpmath as mp

    a = mp.mpf(kappa) / 4
    q = mp.mpc(q)
    ml = lambda al, be: mp.nsum(lambda j: q ** j / mp.gamma(al * j + be), [0, mp.inf])  # noqa: E731
    if laplace is first_passage_laplace:
        return ml(a, 1) - q ** (1 - 1 / a) * ml(a, a)
    if laplace is point_hitting_laplace:
        return mp.exp(q ** (1 / a)) - a * q ** (1 - 1 / a) * ml(a, a)
    raise ValueError("unknown Laplace transform")


# --------------------------------------------------------------------------
# Density registry
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DensitySpec:
    name: str
    kappa: float
    support: str
    pdf: Callable[..., float]


def density_spec(name: str, kappa: float) -> DensitySpec:
    table = {
        "overshoot": ("w > 0", lambda w: overshoot_density(w, kappa)),
        "arcsine": ("0 < x < 1", lambda x: arcsine_density(x, kappa)),
        "joint_dk": ("u > 0, 0 <= y < 1, v >= y", lambda u, v, y: joint_density_dk(u, v, y, kappa)),
        "fpt_series": ("t >= 1", lambda t: fpt_density_series(t, kappa).value),
    }
    if name not in table:
        raise KeyError(name)
    support, pdf = table[name]
    return DensitySpec(name, kappa, support, pdf)


def tabulate(fn: Callable[[float], float], xs) -> list[tuple[float, float]]:
    """(x, value) rows for plotting."""
    return [(float(x), float(fn(float(x)))) for x in xs]
