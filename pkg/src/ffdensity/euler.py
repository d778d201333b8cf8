"""Euler products over F_q[t], the constants of the density theorems, family-size
closed forms and an exact generating-series coefficient oracle.

Products run over prime-degree classes: a local factor depending only on d(P)
is raised to the number of monic irreducibles of degree d.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .characters import KUMMER, FamilySpec
from .config import DEFAULTS
from .gfpoly import Poly, factorize, prime_count

ZETA3 = cmath.exp(2j * math.pi / 3)


class EulerRegionError(ValueError):
    pass


class EulerToleranceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class EulerResult:
    value: complex
    tail_bound: float
    cutoff: int


def _clog1p(z: complex) -> complex:
    """log(1 + z) without cancellation for small z."""
    z = complex(z)
    re = 0.5 * math.log1p(2 * z.real + abs(z) ** 2)
    return complex(re, math.atan2(z.imag, 1 + z.real))


def _degree_product(q: int, cutoff: int, delta: Callable[[int], complex],
                    majorant: Callable[[int], float]) -> EulerResult:
    """prod_{d <= cutoff} (1 + delta(d))^{pi_q(d)} and a bound on the omitted log-tail."""
    logsum = 0j
    for d in range(1, cutoff + 1):
        logsum += prime_count(q, d) * _clog1p(delta(d))
    tail, prev = 0.0, None
    for d in range(cutoff + 1, cutoff + 400):
        m = majorant(d)
        if m >= 1:
            return EulerResult(cmath.exp(logsum), math.inf, cutoff)
        if m == 0:
            break
        lt = d * math.log(q) - math.log(d) + math.log(m) - math.log1p(-m)
        if lt > 700:
            return EulerResult(cmath.exp(logsum), math.inf, cutoff)
        term = math.exp(lt)
        tail += term
        if term < 1e-30 * max(tail, 1e-300) or term < 1e-40:
            r = term / prev if prev else 0.0
            if r >= 1:
                return EulerResult(cmath.exp(logsum), math.inf, cutoff)
            tail += term * r / (1 - r)  # geometric remainder
            break
        prev = term
    else:
        tail = math.inf  # no convergence within the scan window
    return EulerResult(cmath.exp(logsum), tail, cutoff)


# local factors minus one, as functions of X = x^d, Y = y^d, and majorants of their size

def _j_delta(X, Y):
    # (1+X+Y)(1-X)(1-Y) - 1
    return -X * X - Y * Y - X * Y + X * X * Y + X * Y * Y


def _j_major(a, b):
    return a * a + b * b + a * b + a * a * b + a * b * b


def _quartic_delta(U):
    # (1+2U)(1-U)^2 - 1
    return -3 * U * U + 2 * U ** 3


def _quartic_major(a):
    return 3 * a * a + 2 * a ** 3


def _e_delta(u, d):
    if d % 2 == 0:
        return -u ** d / (1 + u ** (d // 2)) ** 2
    return -u ** d / (1 + u ** d)


def _e_major(a, d):
    if d % 2 == 0:
        h = a ** (d / 2)
        return a ** d / (1 - h) ** 2
    return a ** d / (1 - a ** d)


def _prime_degrees(f: Poly | None) -> list[int]:
    if f is None or f.degree <= 0:
        return []
    return [P.degree for P, _ in factorize(f).factors]


def euler_eval(kind: str, q: int, *, x: complex = 0, y: complex = 0, u: complex = 0,
               f: Poly | None = None, cutoff: int | None = None,
               tol: float | None = None) -> EulerResult:
    """Truncated Euler product.

    kinds: ``J0_cubic(x, y)``, ``J_cubic(x, y; f)``, ``J0_quartic(u)``,
    ``E0(u)`` and ``Ef(u; f)``. ``Ef`` is the finite product over primes
    dividing f, so its tail bound is zero.
    """
    cutoff = DEFAULTS["euler_cutoff"] if cutoff is None else cutoff
    tol = DEFAULTS["euler_tol"] if tol is None else tol
    if kind in ("J0_cubic", "J_cubic"):
        r = q ** (-1 / 3)
        if abs(x) >= r or abs(y) >= r:
            raise EulerRegionError(f"|x|, |y| must be below q^(-1/3) = {r:.6g}")
        res = _degree_product(q, cutoff, lambda d: _j_delta(x ** d, y ** d),
                              lambda d: _j_major(abs(x) ** d, abs(y) ** d))
        if kind == "J_cubic":
            corr = 1
            for d in _prime_degrees(f):
                corr /= 1 + x ** d + y ** d
            res = EulerResult(res.value * corr, res.tail_bound, cutoff)
    elif kind == "J0_quartic":
        if abs(u) >= q ** (-1 / 3):
            raise EulerRegionError("|u| must be below q^(-1/3)")
        res = _degree_product(q, cutoff, lambda d: _quartic_delta(u ** d),
                              lambda d: _quartic_major(abs(u) ** d))
    elif kind == "E0":
        if abs(u) >= 1 / q:
            raise EulerRegionError("|u| must be below 1/q")
        res = _degree_product(q, cutoff, lambda d: _e_delta(u, d),
                              lambda d: _e_major(abs(u), d))
    elif kind == "Ef":
        val = 1
        for d in _prime_degrees(f):
            val *= 1 + _e_delta(u, d)
        return EulerResult(complex(val), 0.0, 0)
    else:
        raise ValueError(f"unknown Euler product kind {kind!r}")
    if res.tail_bound > tol:
        raise EulerToleranceError(f"tail bound {res.tail_bound:.3e} exceeds {tol:.1e} at cutoff {cutoff}")
    return res


def j_derivative(kind: str, q: int, u0: float, cutoff: int | None = None) -> float:
    """d/du of J0(u, u) (cubic_diag) or J0(u) (quartic_diag) from the log-derivative.

    Both diagonals share the local factor 1 - 3U^2 + 2U^3 with U = u^d.
    """
    if kind not in ("cubic_diag", "quartic_diag"):
        raise ValueError(f"unknown derivative kind {kind!r}")
    cutoff = DEFAULTS["euler_cutoff"] if cutoff is None else cutoff
    if abs(u0) >= q ** (-1 / 3):
        raise EulerRegionError("u0 outside the region of analyticity")
    val = _diag_value(kind, q, u0, cutoff)
    dlog = 0.0
    for d in range(1, cutoff + 1):
        U = u0 ** d
        dU = d * u0 ** (d - 1)
        dlog += prime_count(q, d) * (-6 * U + 6 * U * U) * dU / (1 - 3 * U * U + 2 * U ** 3)
    return val * dlog


def _diag_value(kind: str, q: int, u: float, cutoff: int) -> float:
    if kind == "cubic_diag":
        return euler_eval("J0_cubic", q, x=u, y=u, cutoff=cutoff, tol=math.inf).value.real
    return euler_eval("J0_quartic", q, u=u, cutoff=cutoff, tol=math.inf).value.real


def j_derivative_fd(kind: str, q: int, u0: float, h: float | None = None,
                    cutoff: int | None = None) -> float:
    h = DEFAULTS["fd_step"] if h is None else h
    cutoff = DEFAULTS["euler_cutoff"] if cutoff is None else cutoff
    return (_diag_value(kind, q, u0 + h, cutoff) - _diag_value(kind, q, u0 - h, cutoff)) / (2 * h)


def c_Q(Q: Poly | int, q: int | None = None) -> complex:
    """D_Q(1/q, zeta3/q) / D_Q(1/q, 1/q) with D_Q(u1, u2) = (1 + u1^d + u2^d)^(-1)."""
    if isinstance(Q, Poly):
        d, q = Q.degree, Q.field.order
    else:
        d = Q
    if d % 3 == 0:
        return 1 + 0j
    x = float(q) ** (-d)
    return (1 + 2 * x) / (1 + x + ZETA3 ** d * x)



def quartic_G(g: int) -> int:
    return 2 * g // 3 + 1


def family_size_predicted(spec: FamilySpec, which: str = "main_term",
                          cutoff: int | None = None) -> float:
    """Closed-form family size.

    Kummer cubic: ``main_term`` is (q^{g+1}/3)[(g+2)J0 - J0'/q];
    ``with_secondary_terms`` adds the two zeta3-twisted terms.
    Kummer quartic: (q^{G+2}/2)[(G+1)J0 - J0'/q].
    Non-Kummer: ``main_term``/``residue`` is q^D (1 - q^-2) E0(1/q^2) and
    ``printed`` is q^D (q^-2 - q^-4) E0(1/q^2).
    """
    q, g = spec.ctx.q, spec.genus
    if spec.setting == KUMMER and spec.ell == 3:
        u = 1 / q
        j0 = euler_eval("J0_cubic", q, x=u, y=u, cutoff=cutoff).value.real
        dj = j_derivative("cubic_diag", q, u, cutoff)
        val = (g + 2) * j0 - dj / q
        if which == "with_secondary_terms":
            a = euler_eval("J0_cubic", q, x=u, y=ZETA3 * u, cutoff=cutoff).value
            b = euler_eval("J0_cubic", q, x=ZETA3 ** 2 * u, y=u, cutoff=cutoff).value
            tw = -a * ZETA3 ** (1 + g) / (1 - ZETA3) - b * ZETA3 ** (2 + 2 * g) / (1 - ZETA3 ** 2)
            if abs(tw.imag) > 1e-10:
                raise ArithmeticError("twisted secondary terms are not real")
            val += tw.real
        elif which != "main_term":
            raise ValueError(f"unknown prediction {which!r}")
        return q ** (g + 1) / 3 * val
    if spec.setting == KUMMER and spec.ell == 4:
        G = quartic_G(g)
        u = 1 / q
        j0 = euler_eval("J0_quartic", q, u=u, cutoff=cutoff).value.real
        dj = j_derivative("quartic_diag", q, u, cutoff)
        return q ** (G + 2) / 2 * ((G + 1) * j0 - dj / q)
    if spec.setting != KUMMER:
        D = spec.D
        e0 = euler_eval("E0", q, u=1 / q ** 2, cutoff=cutoff).value.real
        if which in ("main_term", "residue"):
            return q ** D * (1 - q ** -2) * e0
        if which == "printed":
            return q ** D * (q ** -2 - q ** -4) * e0
        raise ValueError(f"unknown prediction {which!r}")
    raise ValueError("no closed form for this family")


def size_budget(spec: FamilySpec, constant: float | None = None,
                eps: float | None = None) -> float:
    """Error-term budget for the family-size closed forms: C q^{g/3 + eps g}
    (cubic), C q^{G/3 + eps g} (quartic), C q^{D/2} (non-Kummer)."""
    constant = DEFAULTS["budget_constant"] if constant is None else constant
    eps = DEFAULTS["epsilon"] if eps is None else eps
    q, g = spec.ctx.q, spec.genus
    if spec.setting == KUMMER and spec.ell == 3:
        return constant * q ** (g / 3 + eps * g)
    if spec.setting == KUMMER:
        return constant * q ** (quartic_G(g) / 3 + eps * g)
    return constant * q ** (spec.D / 2)


def constants(spec: FamilySpec, family_size: float | None = None,
              cutoff: int | None = None) -> dict:
    """h1, h2 (cubic Kummer) or s2 (quartic Kummer) with an order-1/g diagnostic."""
    q, g = spec.ctx.q, spec.genus
    source = "enumerated" if family_size is not None else "predicted"
    if family_size is None:
        family_size = family_size_predicted(spec, "with_secondary_terms" if spec.ell == 3 else "main_term",
                                            cutoff)
    if family_size == 0:
        raise ZeroDivisionError("family size is zero")
    u = 1 / q
    if spec.setting == KUMMER and spec.ell == 3:
        j11 = euler_eval("J0_cubic", q, x=u, y=u, cutoff=cutoff).value.real
        j1z = euler_eval("J0_cubic", q, x=u, y=ZETA3 * u, cutoff=cutoff).value
        h1 = q ** (g + 1) * j1z * ZETA3 ** (1 + g) / (3 * family_size * (1 - ZETA3))
        h2 = -q ** (g + 1) * j11 / (3 * family_size)
        return {"h1": h1, "h2": h2, "family_size": family_size, "family_size_source": source,
                "g_times_abs_h1": g * abs(h1), "g_times_abs_h2": g * abs(h2)}
    if spec.setting == KUMMER and spec.ell == 4:
        G = quartic_G(g)
        j0 = euler_eval("J0_quartic", q, u=u, cutoff=cutoff).value.real
        s2 = q ** (G + 2) * j0 / (2 * family_size)
        return {"s2": s2, "family_size": family_size, "family_size_source": source,
                "G_times_s2": G * s2}
    return {"family_size": family_size, "family_size_source": source}


# ------------------------------------------------------ generating series oracle

def _trunc_mul(a: list, b: list, n: int) -> list:
    out = [0] * (n + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(min(len(b), n + 1 - i)):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def _trunc_pow(a: list, e: int, n: int) -> list:
    r = [1] + [0] * n
    while e:
        if e & 1:
            r = _trunc_mul(r, a, n)
        a = _trunc_mul(a, a, n)
        e >>= 1
    return r


def _binom_series(c: int, k: int, e: int, n: int) -> list[int]:
    """(1 + c u^k)^e truncated at degree n."""
    out = [0] * (n + 1)
    for a in range(0, n // k + 1):
        out[a * k] = math.comb(e, a) * c ** a
    return out


def _kummer_bivariate(q: int, n: int) -> list[list[int]]:
    """Coefficients of x^i y^j (i + j <= n) in prod_P (1 + x^d + y^d)."""
    poly = [[0] * (n + 1) for _ in range(n + 1)]
    poly[0][0] = 1
    for d in range(1, n + 1):
        e = prime_count(q, d)
        fac = [[0] * (n + 1) for _ in range(n + 1)]
        for a in range(0, n // d + 1):
            for b in range(0, (n - a * d) // d + 1):
                if a + b <= e:
                    fac[a * d][b * d] = math.comb(e, a) * math.comb(e - a, b)
        new = [[0] * (n + 1) for _ in range(n + 1)]
        for i in range(n + 1):
            for j in range(n + 1 - i):
                if poly[i][j]:
                    for k in range(n + 1 - i - j):
                        for l in range(n + 1 - i - j - k):
                            if fac[k][l]:
                                new[i + k][j + l] += poly[i][j] * fac[k][l]
        poly = new
    return poly


def series_coefficient(spec: FamilySpec, d: int | None = None, primitive: bool = True,
                       max_degree: int = 30) -> int:
    """Exact family count from the truncated generating product.

    Kummer: sum over admissible degree splits of coefficients of
    prod_P (1 + x^d(P) + y^d(P)). Non-Kummer: coefficient of u^{D/2} in
    prod_{d even} (1 + 2u^{d/2})^{pi_q(d)}, or with ``primitive=False`` in
    prod_{d even} (1 + u^{d/2})^{2 pi_q(d)}, which also counts conductors
    divisible by a conjugate pair.
    """
    q = spec.ctx.q
    if spec.setting == KUMMER:
        n = spec.conductor_degree if d is None else d
        if n > max_degree:
            raise OverflowError(f"degree {n} exceeds the configured maximum {max_degree}")
        poly = _kummer_bivariate(q, n)
        return sum(poly[a][b] for a, b in spec.kummer_splits())
    n = spec.D // 2 if d is None else d
    if n > max_degree:
        raise OverflowError(f"degree {n} exceeds the configured maximum {max_degree}")
    out = [1] + [0] * n
    for k in range(1, n + 1):
        e = prime_count(q, 2 * k)
        fac = _binom_series(2, k, e, n) if primitive else _binom_series(1, k, 2 * e, n)
        out = _trunc_mul(out, fac, n)
    return out[n]


def squarefree_series_coefficient(q: int, d: int) -> int:
    """Coefficient of u^d in prod_P (1 + u^d(P)), i.e. the squarefree count."""
    out = [1] + [0] * d
    for k in range(1, d + 1):
        out = _trunc_mul(out, _binom_series(1, k, prime_count(q, k), d), d)
    return out[d]


def e0_series(q: int, n: int) -> list[int]:
    """Power series of E0(u) to degree n with exact integer coefficients."""
    out = [1] + [0] * n
    for d in range(1, n + 1):
        loc = [0] * (n + 1)
        loc[0] = 1
        if d % 2 == 0:
            # 1 - u^d (1 + u^{d/2})^{-2}
            h = d // 2
            k = 0
            while d + k * h <= n:
                loc[d + k * h] -= (k + 1) * (-1) ** k
                k += 1
        else:
            # (1 + u^d)^{-1}
            loc = [0] * (n + 1)
            k = 0
            while k * d <= n:
                loc[k * d] = (-1) ** k
                k += 1
        out = _trunc_mul(out, _trunc_pow(loc, prime_count(q, d), n), n)
    return out


def nonkummer_series_via_e0(q: int, n: int) -> Fraction:
    """Coefficient of u^n in (1 - q^2u^2)/(1 - q^2u) * E0(u)."""
    e0 = e0_series(q, n)
    front = [q ** (2 * k) for k in range(n + 1)]
    for k in range(2, n + 1):
        front[k] -= q ** 2 * q ** (2 * (k - 2))
    return Fraction(_trunc_mul(front, e0, n)[n])
