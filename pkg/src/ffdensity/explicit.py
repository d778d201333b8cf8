"""Prime-power character sums and the explicit formula for the zero angles.

Counts of primes by character class come from one of two exact routes:
direct evaluation of chi on the monic irreducibles of degree e, or the
recursion n*A_n = sum_k Lambda_k * A_{n-k} in the monoid algebra
Z[mu_ell + {0}], where A_m counts monic f of degree m by the class of chi(f).
The second route only needs A_m for m <= d(h), since every residue class
mod h occurs q^{m-d(h)} times among monics of degree m >= d(h).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .characters import ZERO, Character, fix_omega, residue_symbol
from .config import DEFAULTS
from .gfpoly import Poly, divisors, enumerate_monic, p_code, primes_of_degree, von_mangoldt
from .lfunc import LData, roots_of_unity


@dataclass(frozen=True)
class PrimePowerSum:
    n: int
    value: complex


def _mono_mul(x: list[int], y: list[int], ell: int) -> list[int]:
    out = [0] * (ell + 1)
    for i in range(ell):
        if x[i]:
            for j in range(ell):
                if y[j]:
                    out[(i + j) % ell] += x[i] * y[j]
    tx, ty = sum(x), sum(y)
    out[ell] = x[ell] * ty + tx * y[ell] - x[ell] * y[ell]
    return out


def _mono_pow_map(x: list[int], r: int, ell: int) -> list[int]:
    out = [0] * (ell + 1)
    for i in range(ell):
        out[(i * r) % ell] += x[i]
    out[ell] = x[ell]
    return out


def _monic_class_counts(chi: Character, nmax: int) -> list[list[int]]:
    dh = chi.conductor_degree
    top = min(nmax, dh)
    cc = chi.class_counts(top + 1)
    A = [[int(v) for v in row] for row in cc]
    q = chi.ctx.q
    for m in range(top + 1, nmax + 1):
        A.append([v * q ** (m - dh) for v in A[dh]])
    return A


def prime_classes_recursive(chi: Character, nmax: int) -> list[list[int]]:
    """P[e][j] = #{primes Q of degree e : chi(Q) = zeta^j} (j = ell counts chi(Q) = 0)."""
    ell = chi.ell
    A = _monic_class_counts(chi, nmax)
    Lam: list[list[int] | None] = [None]
    for n in range(1, nmax + 1):
        acc = [n * v for v in A[n]]
        for k in range(1, n):
            t = _mono_mul(Lam[k], A[n - k], ell)
            acc = [a - b for a, b in zip(acc, t)]
        Lam.append(acc)
    P: list[list[int] | None] = [None]
    for n in range(1, nmax + 1):
        acc = list(Lam[n])
        for e in divisors(n)[:-1]:
            t = _mono_pow_map(P[e], n // e, ell)
            acc = [a - e * b for a, b in zip(acc, t)]
        if any(a % n for a in acc):
            raise ArithmeticError("prime class counts are not integral")
        P.append([a // n for a in acc])
    return P


def prime_classes_direct(chi: Character, e: int) -> list[int]:
    """Class counts over the primes of degree e by evaluating chi on each prime."""
    q = chi.ctx.q
    F = chi.ctx.Fq
    ex = chi.exponents_upto(e + 1)
    off = sum(q ** m for m in range(e))
    idx = np.array([off + p_code(F, P) for P, _ in primes_of_degree(F, e)], dtype=np.int64)
    vals = ex[idx]
    lab = np.where(vals < 0, chi.ell, vals)
    return [int(v) for v in np.bincount(lab, minlength=chi.ell + 1)]


def prime_classes(chi: Character, nmax: int, limit: int | None = None) -> list[list[int]]:
    limit = DEFAULTS["direct_prime_limit"] if limit is None else limit
    q = chi.ctx.q
    if q ** nmax <= limit:
        return [None] + [prime_classes_direct(chi, e) for e in range(1, nmax + 1)]
    return prime_classes_recursive(chi, nmax)


def lambda_chi_sum(chi: Character, n: int, P=None) -> complex:
    """sum over f in M_n of Lambda(f) chi(f), iterating pairs (Q, r) with r d(Q) = n."""
    if P is None:
        P = prime_classes(chi, n)
    z = roots_of_unity(chi.ell)
    tot = 0j
    for e in divisors(n):
        r = n // e
        cnt = P[e]
        tot += e * sum(cnt[j] * z[(j * r) % chi.ell] for j in range(chi.ell))
    return tot


def lambda_chi_sum_bruteforce(chi: Character, n: int) -> complex:
    """Reference oracle: loop over all of M_n, factoring each f and evaluating
    chi(f) from power residue symbols by modular exponentiation."""
    om = fix_omega(chi.ctx, chi.ell, chi.setting)
    B = chi.base_field
    z = roots_of_unity(chi.ell)
    tot = 0j
    for f in enumerate_monic(chi.ctx, n):
        lam = von_mangoldt(f)
        if not lam:
            continue
        fB = Poly(f.coeffs, B)
        j = 0
        for P, e in chi.parts:
            r = residue_symbol(fB, Poly(P, B), chi.ell, om)
            if r == ZERO:
                j = ZERO
                break
            j += e * r
        if j != ZERO:
            tot += lam * z[j % chi.ell]
    return tot


def prime_power_side(chi: Character, n: int, P=None) -> complex:
    """b/q^{n/2} + sum_{f in M_|n|} Lambda(f) chi(f) / q^{|n|/2}; conj chi for n < 0."""
    if n == 0:
        raise ValueError("n = 0 is not covered by the explicit formula")
    m = abs(n)
    val = (chi.b + lambda_chi_sum(chi, m, P)) / chi.ctx.q ** (m / 2)
    return val if n > 0 else val.conjugate()


def prime_power_sums(chi: Character, N: int) -> list[PrimePowerSum]:
    P = prime_classes(chi, N)
    return [PrimePowerSum(n, prime_power_side(chi, n, P)) for n in range(1, N + 1)]


def zero_side(L: LData, n: int) -> complex:
    """-sum_j e(n theta_j)."""
    return -complex(np.sum(np.exp(2j * np.pi * n * L.zeros)))


def verify_explicit_formula(chi: Character, L: LData, N: int) -> tuple[float, list[float]]:
    """Max over 1 <= n <= N of |-sum_j e(n theta_j) - prime_power_side(chi, n)|."""
    if L.zeros is None:
        raise ValueError("zeros have not been computed")
    P = prime_classes(chi, N)
    res = [float(abs(zero_side(L, n) - prime_power_side(chi, n, P))) for n in range(1, N + 1)]
    return max(res), res
