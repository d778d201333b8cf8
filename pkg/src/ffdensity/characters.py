"""Power residue symbols and families of primitive order-ell characters.

Character values are kept as exponents j (value zeta_ell**j) with ``ZERO``
marking chi(f) = 0.  The fast path evaluates chi_P(f) through a root alpha of P
in the extension K = F_{|P|}: the symbol exponent is c * log_K(f(alpha)) mod ell,
where c is the base-field discrete log of the norm of K's generator.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from .gfpoly import (Field, FieldCtx, Poly, factorize, is_irreducible_tuple,
                     p_code, p_divmod, p_mul, p_powmod, primes_of_degree,
                     squarefree_from_primes)

ZERO = -1
KUMMER = "kummer"
NON_KUMMER = "nonkummer"


class AdmissibilityError(ValueError):
    pass


def D_of(ell: int, g: int) -> int:
    """Conductor degree D(ell) = (2g + 2ell - 2)/(ell - 1); must be integral."""
    num = 2 * g + 2 * ell - 2
    if num % (ell - 1):
        raise AdmissibilityError(f"D({ell}) is not integral for g={g}")
    return num // (ell - 1)


def _norm_setting(setting: str) -> str:
    s = setting.lower().replace("-", "").replace("_", "")
    if s in ("k", "kummer"):
        return KUMMER
    if s in ("nk", "nonkummer"):
        return NON_KUMMER
    raise ValueError(f"unknown setting {setting!r}")


# ------------------------------------------------------------------ Omega

@dataclass(frozen=True)
class OmegaMap:
    """Exponent lookup between mu_ell in C and the ell-th roots of unity of a field."""

    ell: int
    setting: str
    field: Field
    zeta: int  # Omega(zeta_ell) as a field element

    @property
    def step(self) -> int:
        return self.field.qm1 // self.ell

    def element(self, j: int) -> int:
        return self.field.power(self.zeta, j % self.ell)

    def exponent(self, x: int) -> int:
        lg = self.field._log[x] if x else -1
        if lg < 0 or lg % self.step:
            raise ValueError("element is not an ell-th root of unity")
        return lg // self.step


def fix_omega(ctx: FieldCtx, ell: int, setting: str) -> OmegaMap:
    setting = _norm_setting(setting)
    q = ctx.q
    if setting == KUMMER:
        if (q - 1) % ell:
            raise AdmissibilityError(f"Kummer setting needs ell | q-1 (q={q}, ell={ell})")
        F = ctx.Fq
    else:
        if (q * q - 1) % ell or (q - 1) % ell == 0:
            raise AdmissibilityError(f"non-Kummer setting needs ell | q^2-1 and ell not dividing q-1 (q={q}, ell={ell})")
        F = ctx.Fq2
    return OmegaMap(ell, setting, F, F.power(F.generator, F.qm1 // ell))


def residue_symbol(f: Poly, P: Poly, ell: int, omega: OmegaMap) -> int:
    """Exponent j with f^((|P|-1)/ell) = Omega(zeta^j) mod P, or ZERO if P | f.

    Direct modular exponentiation; the reference route for the fast evaluator.
    """
    F = omega.field
    if P.field is not F:
        raise ValueError("P must live over the Omega field")
    if not is_irreducible_tuple(F, P.coeffs):
        raise ValueError("P is not irreducible")
    norm = F.order ** P.degree
    if (norm - 1) % ell:
        raise ValueError("ell does not divide |P|-1")
    fc = f.coeffs
    r = p_divmod(F, fc, P.coeffs)[1]
    if not r:
        return ZERO
    s = p_powmod(F, r, (norm - 1) // ell, P.coeffs)
    if len(s) != 1:
        raise AssertionError("power residue is not a constant")
    return omega.exponent(s[0])


# ---------------------------------------------------------- fast evaluator

class Evaluator:
    """Vectorised chi_P on all monic f in F_q[t] of each degree, per prime P."""

    def __init__(self, ctx: FieldCtx, ell: int, setting: str):
        self.ctx = ctx
        self.ell = ell
        self.setting = _norm_setting(setting)
        self.omega = fix_omega(ctx, ell, setting)
        self.B = self.omega.field
        self._roots: dict[int, dict[tuple, int]] = {}
        self._vecs: dict[tuple, np.ndarray] = {}

    def root(self, P: tuple) -> tuple[Field, int]:
        d = len(P) - 1
        if d not in self._roots:
            self._roots[d] = dict(primes_of_degree(self.B, d))
        return self.B.extend(d), self._roots[d][P]

    def _norm_log(self, K: Field) -> int:
        nk = K._exp[K.qm1 // self.B.qm1]
        if nk >= self.B.order:
            raise AssertionError("norm left the base field")
        return self.B._log[nk]

    def exponent_of(self, P: tuple, f: Iterable[int]) -> int:
        """chi_P(f) for a single polynomial f over F_q (any leading coefficient)."""
        K, alpha = self.root(P)
        val = 0
        for a in reversed(tuple(f)):
            val = K.add(K.mul(val, alpha), a)
        if val == 0:
            return ZERO
        return self._norm_log(K) * K._log[val] % self.ell

    def prime_vector(self, P: tuple, mmax: int) -> np.ndarray:
        """chi_P exponents (ZERO = -1) on monic f of degree 0..mmax-1, concatenated."""
        key = (P, mmax)
        v = self._vecs.get(key)
        if v is not None:
            return v
        K, alpha = self.root(P)
        q, p = self.ctx.q, K.p
        c = self._norm_log(K)
        avals = np.arange(q, dtype=np.int64)
        S = np.zeros((1, K.dim), dtype=np.int64)
        apow = 1
        out = []
        for m in range(mmax):
            top = K.digits(apow)
            codes = K.encode((S + top) % p)
            lg = K.log[codes]
            out.append(np.where(codes == 0, ZERO, (c * lg) % self.ell).astype(np.int8))
            if m + 1 < mmax:
                T = K.vdigits(K.vmul(avals, apow))
                S = ((T[:, None, :] + S[None, :, :]) % p).reshape(-1, K.dim)
                apow = K.mul(apow, alpha)
        v = np.concatenate(out)
        self._vecs[key] = v
        return v

    def clear(self) -> None:
        self._vecs.clear()


_EVALUATORS: dict[tuple, Evaluator] = {}


def get_evaluator(ctx: FieldCtx, ell: int, setting: str) -> Evaluator:
    key = (ctx.p, ctx.k, ell, _norm_setting(setting))
    if key not in _EVALUATORS:
        _EVALUATORS[key] = Evaluator(ctx, ell, setting)
    return _EVALUATORS[key]


def degree_offsets(q: int, mmax: int) -> np.ndarray:
    return np.concatenate([[0], np.cumsum([q ** m for m in range(mmax)])])


# -------------------------------------------------------------- characters

@dataclass(frozen=True)
class Character:
    """Primitive order-ell character.

    ``parts`` lists (prime, exponent) with primes over F_q (Kummer) or over
    F_{q^2} (non-Kummer, exponent 1).  Kummer chi = prod chi_P**i.
    """

    ctx: FieldCtx
    ell: int
    setting: str
    genus: int
    parts: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def evaluator(self) -> Evaluator:
        return get_evaluator(self.ctx, self.ell, self.setting)

    @property
    def base_field(self) -> Field:
        return self.ctx.Fq if self.setting == KUMMER else self.ctx.Fq2

    def conductor_parts(self) -> list[tuple[int, ...]]:
        """[F_1, ..., F_{ell-1}] (Kummer) or [F] (non-Kummer) as coefficient tuples."""
        B = self.base_field
        if self.setting == NON_KUMMER:
            f = (1,)
            for P, _ in self.parts:
                f = p_mul(B, f, P)
            return [f]
        out = []
        for i in range(1, self.ell):
            f = (1,)
            for P, e in self.parts:
                if e == i:
                    f = p_mul(B, f, P)
            out.append(f)
        return out

    @property
    def part_degrees(self) -> tuple[int, ...]:
        return tuple(len(f) - 1 for f in self.conductor_parts())

    @property
    def conductor_degree(self) -> int:
        """d(h) of the character on F_q[t]."""
        d = sum(len(P) - 1 for P, _ in self.parts)
        return 2 * d if self.setting == NON_KUMMER else d

    @property
    def D(self) -> int:
        return D_of(self.ell, self.genus)

    @cached_property
    def is_even(self) -> bool:
        return char_parity(self)[0] == "even"

    @property
    def b(self) -> int:
        return 1 if self.is_even else 0

    def key(self) -> frozenset:
        return frozenset(self.parts)

    def conjugate(self) -> Character:
        if self.setting == KUMMER:
            parts = tuple((P, (-e) % self.ell) for P, e in self.parts)
        else:
            B = self.ctx.Fq2
            parts = tuple(sorted(((_conj(B, P, self.ctx.q), e) for P, e in self.parts),
                                 key=lambda t: (len(t[0]), p_code(B, t[0]))))
        return Character(self.ctx, self.ell, self.setting, self.genus, parts)

    def exponents_upto(self, mmax: int) -> np.ndarray:
        """chi exponents on all monic f of degree < mmax (ZERO where chi = 0)."""
        ev = self.evaluator
        tot = None
        zero = None
        for P, e in self.parts:
            v = ev.prime_vector(P, mmax)
            z = v < 0
            t = v.astype(np.int16) * e
            tot = t if tot is None else tot + t
            zero = z if zero is None else zero | z
        if tot is None:
            return np.zeros(int(degree_offsets(self.ctx.q, mmax)[-1]), dtype=np.int8)
        out = (tot % self.ell).astype(np.int8)
        out[zero] = ZERO
        return out

    def class_counts(self, mmax: int) -> np.ndarray:
        """Integer array A[m, j] = #{f in M_m : chi(f) = zeta^j}; column ell counts zeros."""
        ex = self.exponents_upto(mmax)
        lab = np.where(ex < 0, self.ell, ex).astype(np.int64)
        q, L = self.ctx.q, self.ell + 1
        deg = np.repeat(np.arange(mmax), [q ** m for m in range(mmax)])
        return np.bincount(deg * L + lab, minlength=mmax * L).reshape(mmax, L)

    def to_json(self) -> dict:
        return {"ell": self.ell, "setting": self.setting, "q": self.ctx.q,
                "genus": self.genus,
                "conductor_parts": [list(f) for f in self.conductor_parts()],
                "parity": "even" if self.is_even else "odd"}


def char_eval(chi: Character, f: Poly) -> int:
    """Exponent of chi(f), or ZERO."""
    if f.field is not chi.ctx.Fq:
        raise ValueError("argument must be a polynomial over F_q")
    ev = chi.evaluator
    tot = 0
    for P, e in chi.parts:
        j = ev.exponent_of(P, f.coeffs)
        if j == ZERO:
            return ZERO
        tot += e * j
    return tot % chi.ell


def char_value(chi: Character, f: Poly) -> complex:
    j = char_eval(chi, f)
    return 0j if j == ZERO else complex(np.exp(2j * np.pi * j / chi.ell))


def char_parity(chi: Character) -> tuple[str, int]:
    """(parity, r) where chi restricted to F_q^x is psi**r, psi the fixed order-ell character."""
    g = chi.ctx.Fq.generator
    ev = chi.evaluator
    j = sum(e * ev.exponent_of(P, (g,)) for P, e in chi.parts) % chi.ell
    if chi.setting == KUMMER:
        cong = sum(e * (len(P) - 1) for P, e in chi.parts) % chi.ell
        if cong != j:
            raise AssertionError("parity congruence disagrees with evaluation")
    elif j != 0:
        raise AssertionError("non-Kummer character is not even")
    return ("even" if j == 0 else "odd", j)


# -------------------------------------------------------------- families

@dataclass(frozen=True)
class FamilySpec:
    ctx: FieldCtx
    ell: int
    setting: str
    genus: int

    def __post_init__(self):
        object.__setattr__(self, "setting", _norm_setting(self.setting))

    @property
    def D(self) -> int:
        return D_of(self.ell, self.genus)

    @property
    def conductor_degree(self) -> int:
        return self.D if self.setting == NON_KUMMER else self.D - 1

    @property
    def b(self) -> int:
        return 1 if self.setting == NON_KUMMER else 0

    @property
    def n_zeros(self) -> int:
        return self.D - 2

    def check(self) -> None:
        q, ell, g = self.ctx.q, self.ell, self.genus
        if ell not in (3, 4, 6):
            raise AdmissibilityError(f"order ell={ell} not supported (3, 4, 6)")
        if g < 1:
            raise AdmissibilityError("genus must be >= 1")
        if self.setting == KUMMER:
            if ell == 6:
                raise AdmissibilityError("sextic Kummer families are not implemented")
            if (q - 1) % (2 * ell):
                raise AdmissibilityError(f"Kummer ell={ell} requires q ≡ 1 (mod {2 * ell}); got q={q}")
            if ell == 4 and g % 6:
                raise AdmissibilityError(f"quartic Kummer requires g ≡ 0 (mod 6); got g={g}")
        else:
            if (q - 1) % ell == 0:
                raise AdmissibilityError(f"non-Kummer ell={ell} requires q ≢ 1 (mod {ell}); got q={q}")
            if (g + ell - 1) % (ell - 1):
                raise AdmissibilityError(f"non-Kummer ell={ell} requires (ell-1) | (g+ell-1); got g={g}")

    def kummer_splits(self) -> list[tuple[int, int]]:
        """Degree pairs (d_1, d_{ell-1}) allowed in the Kummer family."""
        tot = self.D - 1
        e = self.ell - 1
        return [(d1, tot - d1) for d1 in range(tot + 1) if (d1 + e * (tot - d1)) % self.ell == 1]

    def label(self) -> str:
        return f"q{self.ctx.q}_l{self.ell}_{self.setting}_g{self.genus}"


def enumerate_family(spec: FamilySpec) -> Iterator[Character]:
    """All characters of the family in deterministic order."""
    spec.check()
    ctx, ell = spec.ctx, spec.ell
    if spec.setting == KUMMER:
        F = ctx.Fq
        e = ell - 1
        for d1, d2 in spec.kummer_splits():
            first = squarefree_from_primes(F, d1)
            for _, ps1 in first:
                s1 = frozenset(ps1)
                for _, ps2 in squarefree_from_primes(F, d2, exclude=s1):
                    parts = tuple((P, 1) for P in ps1) + tuple((P, e) for P in ps2)
                    yield Character(ctx, ell, KUMMER, spec.genus, parts)
    else:
        for ps in _nonkummer_conductors(spec, primitive=True):
            yield Character(ctx, ell, NON_KUMMER, spec.genus, tuple((P, 1) for P in ps))


def _conj(B: Field, P: tuple, q: int) -> tuple:
    return tuple(B.power(c, q) for c in P)


def _nonkummer_conductors(spec: FamilySpec, primitive: bool) -> Iterator[tuple]:
    """Prime sets of squarefree F over F_{q^2} of degree D/2 with no prime factor
    in F_q[t].  With ``primitive`` also drop F divisible by a conjugate pair
    pi * conj(pi): that product is a prime of F_q[t] and the restriction of
    chi_pi chi_conj(pi) to F_q[t] is principal."""
    ctx = spec.ctx
    B, q = ctx.Fq2, ctx.q
    half = spec.D // 2
    bad = set()
    for d in range(1, half + 1):
        for P, _ in primes_of_degree(B, d):
            if all(c < q for c in P):
                bad.add(P)
    for _, ps in squarefree_from_primes(B, half, exclude=frozenset(bad)):
        if primitive:
            s = set(ps)
            if any(_conj(B, P, q) in s for P in ps):
                continue
        yield ps


def enumerate_conductors(spec: FamilySpec, primitive: bool = True) -> list[tuple[int, ...]]:
    """Conductor polynomials of a non-Kummer family (``primitive=False`` keeps
    the conjugate-pair products as well)."""
    spec.check()
    if spec.setting != NON_KUMMER:
        raise ValueError("conductor listing is for non-Kummer families")
    B = spec.ctx.Fq2
    out = []
    for ps in _nonkummer_conductors(spec, primitive):
        f = (1,)
        for P in ps:
            f = p_mul(B, f, P)
        out.append(f)
    return out


def build_family(spec: FamilySpec) -> list[Character]:
    return list(enumerate_family(spec))


def write_manifest(chars: Iterable[Character], path, meta: dict | None = None) -> int:
    """JSON lines, one character per line; ``meta`` goes first under the key "_meta"."""
    n = 0
    with open(path, "w") as fh:
        if meta is not None:
            fh.write(json.dumps({"_meta": meta}, separators=(",", ":"), sort_keys=True) + "\n")
        for chi in chars:
            fh.write(json.dumps(chi.to_json(), separators=(",", ":")) + "\n")
            n += 1
    return n


# ------------------------------------------------------------ reciprocity

def jacobi_symbol(a: Poly, b: Poly, ell: int, omega: OmegaMap) -> int:
    """chi_a(b) = prod over P^e || a of (b/P)^e, as an exponent or ZERO."""
    tot = 0
    for P, e in factorize(a).factors:
        j = residue_symbol(b, P, ell, omega)
        if j == ZERO:
            return ZERO
        tot += e * j
    return tot % ell


def reciprocity_check(a: Poly, b: Poly, ell: int, ctx: FieldCtx) -> bool:
    """True iff chi_a(b) = chi_b(a) for coprime monic a, b (needs q = 1 mod 2ell)."""
    if (ctx.q - 1) % (2 * ell):
        raise AdmissibilityError(f"reciprocity requires q ≡ 1 (mod {2 * ell})")
    if not (a.is_monic() and b.is_monic()):
        raise ValueError("arguments must be monic")
    if a.gcd(b).degree != 0:
        raise ValueError("arguments are not coprime")
    om = fix_omega(ctx, ell, KUMMER)
    return jacobi_symbol(a, b, ell, om) == jacobi_symbol(b, a, ell, om)


def kummer_character(ctx: FieldCtx, ell: int, parts: dict[int, Poly], genus: int | None = None) -> Character:
    """Kummer character prod chi_{F_i}**i from squarefree pairwise coprime F_i."""
    plist = []
    seen = set()
    for i, Fi in sorted(parts.items()):
        for P, e in factorize(Fi).factors:
            if e != 1 or P.coeffs in seen:
                raise ValueError("parts must be squarefree and pairwise coprime")
            seen.add(P.coeffs)
            plist.append((P.coeffs, i % ell))
    if genus is None:
        deg = sum(len(P) - 1 for P, _ in plist)
        genus = ((deg + 1) * (ell - 1) - 2 * ell + 2) // 2
    return Character(ctx, ell, KUMMER, genus, tuple(plist))


def nonkummer_character(ctx: FieldCtx, ell: int, F: Poly, genus: int | None = None) -> Character:
    if F.field is not ctx.Fq2:
        raise ValueError("conductor must be over F_{q^2}")
    plist = []
    for P, e in factorize(F).factors:
        if e != 1:
            raise ValueError("conductor must be squarefree")
        if all(c < ctx.q for c in P.coeffs):
            raise ValueError("conductor has a prime factor in F_q[t]")
        plist.append((P.coeffs, 1))
    if genus is None:
        D = 2 * F.degree
        genus = (D * (ell - 1) - 2 * ell + 2) // 2
    return Character(ctx, ell, NON_KUMMER, genus, tuple(plist))
