"""Finite fields F_q, F_{q^2} and arithmetic in their polynomial rings.

Field elements are plain integers.  An element of ``base[x]/(m)`` is encoded
as ``sum(c_i * base.order**i)`` where ``c_i`` are the codes of its coefficients
in the base field, so the base-p digits of any code are its F_p coordinates
and every subfield in a tower keeps its codes unchanged (constants embed
coefficient-wise).

Polynomials are tuples of codes, low degree first, with no trailing zeros.
The canonical order on monic polynomials of a fixed degree d is increasing
``sum(c_i * Q**i)`` over the non-leading coefficients, i.e. lexicographic on
the coefficient vector read from ``c_{d-1}`` down to ``c_0``.  The same order
picks moduli and generators.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "Field", "FieldCtx", "Poly", "Factorization", "field_make",
    "enumerate_monic", "factorize", "von_mangoldt", "mobius",
    "embed_extension", "is_irreducible", "prime_count", "primes_of_degree",
    "von_mangoldt_total", "irreducible_count_frobenius", "is_prime",
    "prime_factors", "divisors", "mobius_int", "p_code", "monic_tuples",
]


# ---------------------------------------------------------------- integers

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n: int) -> list[int]:
    out, i = [], 2
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            while n % i == 0:
                n //= i
        i += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def mobius_int(n: int) -> int:
    k, i = 0, 2
    while i * i <= n:
        if n % i == 0:
            n //= i
            if n % i == 0:
                return 0
            k += 1
        i += 1
    if n > 1:
        k += 1
    return -1 if k % 2 else 1


def prime_count(q: int, d: int) -> int:
    """Number of monic irreducibles of degree d over F_q (necklace formula)."""
    return sum(mobius_int(e) * q ** (d // e) for e in divisors(d)) // d


def _matpow_mod(m: np.ndarray, e: int, p: int) -> np.ndarray:
    r = np.eye(m.shape[0], dtype=np.int64)
    b = m.copy()
    while e:
        if e & 1:
            r = (r @ b) % p
        b = (b @ b) % p
        e >>= 1
    return r


# ------------------------------------------------------------------ fields

class Field:
    """Finite field given as ``base[x]/(modulus)`` or as a prime field."""

    def __init__(self, p: int, base: Field | None = None,
                 modulus: Sequence[int] | None = None):
        self.p = p
        self.base = base
        if base is None:
            self.n, self.dim, self.order = 1, 1, p
            self.modulus = None
        else:
            self.modulus = tuple(modulus)
            self.n = len(self.modulus) - 1
            self.dim = base.dim * self.n
            self.order = base.order ** self.n
        self.qm1 = self.order - 1
        self._pw = np.array([p ** s for s in range(self.dim)], dtype=np.int64)
        self._ext: dict[int, Field] = {}
        self.generator = self._find_generator()
        self._build_tables()

    @classmethod
    def prime(cls, p: int) -> Field:
        return cls(p)

    @classmethod
    def extension(cls, base: Field, n: int) -> Field:
        """Extension of degree n with the smallest irreducible modulus."""
        return cls(base.p, base, smallest_irreducible(base, n))

    def extend(self, n: int) -> Field:
        """Cached degree-n extension (n = 1 returns self)."""
        if n == 1:
            return self
        if n not in self._ext:
            self._ext[n] = Field.extension(self, n)
        return self._ext[n]

    def __repr__(self) -> str:
        return f"Field(order={self.order})"

    # slow arithmetic used only while the tables are being built
    def _slow_mul(self, a: int, b: int) -> int:
        if self.base is None:
            return a * b % self.p
        B, Q, n = self.base, self.base.order, self.n
        va = [(a // Q ** i) % Q for i in range(n)]
        vb = [(b // Q ** i) % Q for i in range(n)]
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(va):
            if x:
                for j, y in enumerate(vb):
                    if y:
                        prod[i + j] = B.add(prod[i + j], B.mul(x, y))
        m = self.modulus
        for i in range(2 * n - 2, n - 1, -1):
            c = prod[i]
            if c:
                for j in range(n):
                    prod[i - n + j] = B.sub(prod[i - n + j], B.mul(c, m[j]))
        return sum(prod[i] * Q ** i for i in range(n))

    def _mult_matrix(self, x: int) -> np.ndarray:
        cols = [self.digits(self._slow_mul(x, int(w))) for w in self._pw]
        return np.array(cols, dtype=np.int64).T

    def _find_generator(self) -> int:
        if self.order == 2:
            return 1
        ident = np.eye(self.dim, dtype=np.int64)
        rs = prime_factors(self.qm1)
        for x in range(1, self.order):
            m = self._mult_matrix(x)
            if all(not np.array_equal(_matpow_mod(m, self.qm1 // r, self.p), ident) for r in rs):
                return x
        raise ValueError("no generator found; modulus is not irreducible")

    def _build_tables(self) -> None:
        p, dim, qm1 = self.p, self.dim, self.qm1
        m = self._mult_matrix(self.generator)
        blk = max(1, int(np.ceil(np.sqrt(qm1))))
        first = np.zeros((blk, dim), dtype=np.int64)
        v = self.digits(1)
        for i in range(blk):
            first[i] = v
            v = (m @ v) % p
        step = _matpow_mod(m, blk, p).T
        parts, cur, total = [first], first, blk
        while total < qm1:
            cur = (cur @ step) % p
            parts.append(cur)
            total += blk
        exp = (np.concatenate(parts)[:qm1] @ self._pw).astype(np.int64)
        log = np.full(self.order, -1, dtype=np.int64)
        log[exp] = np.arange(qm1, dtype=np.int64)
        if (log[1:] < 0).any():
            raise ValueError("generator does not have full order")
        self.exp, self.log = exp, log
        self._exp, self._log = exp.tolist(), log.tolist()
        if self.base is not None and self.order <= 1024:
            a = np.arange(self.order)
            self._add_tab = self.vadd(a[:, None], a[None, :]).tolist()
        else:
            self._add_tab = None

    # coordinates
    def digits(self, x: int) -> np.ndarray:
        return (int(x) // self._pw) % self.p

    def vdigits(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.int64)[..., None] // self._pw) % self.p

    def encode(self, digs: np.ndarray) -> np.ndarray:
        return digs @ self._pw

    # scalar arithmetic
    def add(self, a: int, b: int) -> int:
        if self.base is None:
            return (a + b) % self.p
        if self._add_tab is not None:
            return self._add_tab[a][b]
        return int(self.vadd(np.int64(a), np.int64(b)))

    def neg(self, a: int) -> int:
        if self.base is None:
            return -a % self.p
        return int(self.vneg(np.int64(a)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % self.qm1]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[-self._log[a] % self.qm1]

    def power(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e > 0 else 1
        return self._exp[self._log[a] * e % self.qm1]

    def element_order(self, a: int) -> int:
        from math import gcd
        return self.qm1 // gcd(self._log[a], self.qm1)

    # vectorised arithmetic on integer arrays
    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.base is None:
            return (a + b) % self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for w in self._pw:
            out += ((a // w + b // w) % self.p) * w
        return out

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.base is None:
            return (-a) % self.p
        out = np.zeros(a.shape, dtype=np.int64)
        for w in self._pw:
            out += ((-(a // w)) % self.p) * w
        return out

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        r = self.exp[(self.log[a] + self.log[b]) % self.qm1]
        return np.where((a == 0) | (b == 0), 0, r)


def smallest_irreducible(F: Field, n: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree n over F in the canonical order."""
    Q = F.order
    for code in range(Q ** n):
        low = [(code // Q ** i) % Q for i in range(n)]
        f = tuple(low) + (1,)
        if low[0] != 0 or n == 1:
            if is_irreducible_tuple(F, f):
                return f
    raise ValueError("no irreducible polynomial found")


# -------------------------------------------------------- tuple polynomials

def _trim(c: Sequence[int]) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def p_add(F: Field, a, b) -> tuple[int, ...]:
    n = max(len(a), len(b))
    return _trim(F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n))


def p_sub(F: Field, a, b) -> tuple[int, ...]:
    n = max(len(a), len(b))
    return _trim(F.sub(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n))


def p_scale(F: Field, a, c: int) -> tuple[int, ...]:
    return _trim(F.mul(x, c) for x in a)


def p_mul(F: Field, a, b) -> tuple[int, ...]:
    if not a or not b:
        return ()
    if F.base is None:
        pr = F.p
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return _trim(v % pr for v in out)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim(out)


def p_divmod(F: Field, a, b) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return (), _trim(r)
    inv_lc = F.inv(b[-1])
    q = [0] * (len(r) - db)
    if F.base is None:
        pr = F.p
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i] % pr
            if c:
                c = c * inv_lc % pr
                q[i - db] = c
                for j in range(db + 1):
                    r[i - db + j] -= c * b[j]
        return _trim(q), _trim(v % pr for v in r[:db])
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        if c:
            c = F.mul(c, inv_lc)
            q[i - db] = c
            for j in range(db + 1):
                r[i - db + j] = F.sub(r[i - db + j], F.mul(c, b[j]))
    return _trim(q), _trim(r[:db])


def p_mod(F: Field, a, b) -> tuple[int, ...]:
    return p_divmod(F, a, b)[1]


def p_monic(F: Field, a) -> tuple[int, ...]:
    if not a:
        return ()
    return p_scale(F, a, F.inv(a[-1]))


def p_gcd(F: Field, a, b) -> tuple[int, ...]:
    while b:
        a, b = b, p_mod(F, a, b)
    return p_monic(F, a)


def p_powmod(F: Field, a, e: int, m) -> tuple[int, ...]:
    result = (1,)
    base = p_mod(F, a, m)
    while e:
        if e & 1:
            result = p_mod(F, p_mul(F, result, base), m)
        base = p_mod(F, p_mul(F, base, base), m)
        e >>= 1
    return result if len(m) > 1 else ()


def p_deriv(F: Field, a) -> tuple[int, ...]:
    out = []
    for i in range(1, len(a)):
        c = 0
        for _ in range(i % F.p):
            c = F.add(c, a[i])
        out.append(c)
    return _trim(out)


def p_eval(F: Field, a, x: int) -> int:
    r = 0
    for c in reversed(a):
        r = F.add(F.mul(r, x), c)
    return r


def p_code(F: Field, a) -> int:
    """Position of a monic polynomial in the canonical order of its degree."""
    Q = F.order
    return sum(c * Q ** i for i, c in enumerate(a[:-1]))


def is_irreducible_tuple(F: Field, f) -> bool:
    """Rabin's test over F."""
    n = len(f) - 1
    if n < 1:
        return False
    f = p_monic(F, f)
    if n == 1:
        return True
    Q = F.order
    x = (0, 1)
    powers = [x]
    for _ in range(n):
        powers.append(p_powmod(F, powers[-1], Q, f))
    if p_sub(F, powers[n], p_mod(F, x, f)):
        return False
    for r in prime_factors(n):
        h = p_sub(F, powers[n // r], x)
        if len(p_gcd(F, f, h)) != 1:
            return False
    return True


# ------------------------------------------------------------ Poly wrapper

@dataclass(frozen=True)
class Poly:
    """Polynomial over a Field; ``coeffs`` is low degree first."""

    coeffs: tuple[int, ...]
    field: Field

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    @property
    def norm(self) -> int:
        """|f| = Q**d(f) for the order Q of the coefficient field."""
        return self.field.order ** self.degree

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __mul__(self, other: Poly) -> Poly:
        return Poly(p_mul(self.field, self.coeffs, other.coeffs), self.field)

    def __add__(self, other: Poly) -> Poly:
        return Poly(p_add(self.field, self.coeffs, other.coeffs), self.field)

    def __sub__(self, other: Poly) -> Poly:
        return Poly(p_sub(self.field, self.coeffs, other.coeffs), self.field)

    def __mod__(self, other: Poly) -> Poly:
        return Poly(p_mod(self.field, self.coeffs, other.coeffs), self.field)

    def __pow__(self, e: int) -> Poly:
        r = (1,)
        for _ in range(e):
            r = p_mul(self.field, r, self.coeffs)
        return Poly(r, self.field)

    def __divmod__(self, other: Poly) -> tuple[Poly, Poly]:
        q, r = p_divmod(self.field, self.coeffs, other.coeffs)
        return Poly(q, self.field), Poly(r, self.field)

    def gcd(self, other: Poly) -> Poly:
        return Poly(p_gcd(self.field, self.coeffs, other.coeffs), self.field)

    def __call__(self, x: int) -> int:
        return p_eval(self.field, self.coeffs, x)

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)}, q={self.field.order})"


# ---------------------------------------------------------------- context

@dataclass(frozen=True)
class FieldCtx:
    """F_q = F_p[x]/(modulus) together with F_{q^2} = F_q[y]/(ext_modulus)."""

    p: int
    k: int
    q: int
    Fp: Field
    Fq: Field
    Fq2: Field

    @property
    def modulus(self) -> tuple[int, ...]:
        return self.Fq.modulus if self.k > 1 else (0, 1)

    @property
    def ext_modulus(self) -> tuple[int, ...]:
        return self.Fq2.modulus

    @property
    def generator(self) -> int:
        return self.Fq.generator

    @property
    def ext_generator(self) -> int:
        return self.Fq2.generator

    def field(self, base: str = "q") -> Field:
        if base in ("q", "Fq"):
            return self.Fq
        if base in ("q2", "Fq2"):
            return self.Fq2
        raise ValueError(f"unknown base {base!r}")

    def poly(self, coeffs: Sequence[int], base: str = "q") -> Poly:
        return Poly(tuple(coeffs), self.field(base))

    def pins(self) -> dict:
        return {"p": self.p, "k": self.k, "q": self.q,
                "modulus": list(self.modulus), "ext_modulus": list(self.ext_modulus),
                "generator": self.generator, "ext_generator": self.ext_generator}


_CTX_CACHE: dict[tuple[int, int], FieldCtx] = {}


def field_make(p: int, k: int = 1) -> FieldCtx:
    """Build (and cache) the deterministic context for q = p**k."""
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if p in (2, 3):
        raise ValueError(f"q={p}**{k} must be odd and coprime to 6")
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    key = (p, k)
    if key not in _CTX_CACHE:
        Fp = Field.prime(p)
        Fq = Fp if k == 1 else Field.extension(Fp, k)
        Fq2 = Fq.extend(2)
        _CTX_CACHE[key] = FieldCtx(p, k, p ** k, Fp, Fq, Fq2)
    return _CTX_CACHE[key]


# ----------------------------------------------------------- enumeration

def _as_field(ctx_or_field, base: str) -> Field:
    return ctx_or_field.field(base) if isinstance(ctx_or_field, FieldCtx) else ctx_or_field


def monic_tuples(F: Field, d: int) -> Iterator[tuple[int, ...]]:
    for t in itertools.product(range(F.order), repeat=d):
        yield tuple(reversed(t)) + (1,)


def primes_of_degree(F: Field, d: int) -> list[tuple[tuple[int, ...], int]]:
    """Monic irreducibles of degree d over F in canonical order, each with a
    root in ``F.extend(d)``.

    Primes are read off as minimal polynomials of Frobenius orbits in the
    extension, so no irreducibility test is needed.
    """
    cache = getattr(F, "_prime_cache", None)
    if cache is None:
        cache = F._prime_cache = {}
    if d in cache:
        return cache[d]
    Q = F.order
    if d == 1:
        out = [((F.neg(a), 1), a) for a in range(Q)]
        out.sort(key=lambda t: p_code(F, t[0]))
        cache[d] = out
        return out
    K = F.extend(d)
    L = np.arange(K.qm1, dtype=np.int64)
    conj_logs = [(L * pow(Q, i, K.qm1)) % K.qm1 for i in range(d)]
    exact = np.ones(K.qm1, dtype=bool)
    for r in prime_factors(d):
        exact &= conj_logs[d // r] != L
    codes = [K.exp[c] for c in conj_logs]
    rep = exact & (codes[0] == np.minimum.reduce(codes))
    roots = [c[rep] for c in codes]
    poly = [np.ones(roots[0].shape, dtype=np.int64)]
    for beta in roots:
        nb = K.vneg(beta)
        new = [K.vmul(nb, poly[0])]
        for j in range(1, len(poly)):
            new.append(K.vadd(poly[j - 1], K.vmul(nb, poly[j])))
        new.append(poly[-1])
        poly = new
    mat = np.stack(poly, axis=1)
    if (mat >= Q).any():
        raise AssertionError("minimal polynomial left the base field")
    out = [(tuple(int(c) for c in row), int(a)) for row, a in zip(mat, roots[0])]
    out.sort(key=lambda t: p_code(F, t[0]))
    cache[d] = out
    return out


def squarefree_from_primes(F: Field, d: int, exclude=frozenset()) -> list[tuple[tuple, tuple]]:
    """Squarefree monics of degree d as (poly, sorted prime tuple), canonical order."""
    plist = []
    for e in range(1, d + 1):
        plist.extend((pr, e) for pr, _ in primes_of_degree(F, e) if pr not in exclude)
    out = []

    def rec(start: int, left: int, chosen: list):
        if left == 0:
            out.append(tuple(chosen))
            return
        for i in range(start, len(plist)):
            pr, e = plist[i]
            if e <= left:
                chosen.append(pr)
                rec(i + 1, left - e, chosen)
                chosen.pop()

    rec(0, d, [])
    res = []
    for ps in out:
        f = (1,)
        for pr in ps:
            f = p_mul(F, f, pr)
        res.append((f, tuple(sorted(ps, key=lambda t: (len(t), p_code(F, t))))))
    res.sort(key=lambda t: p_code(F, t[0]))
    return res


def enumerate_monic(ctx, d: int, kind: str = "all", base: str = "q") -> Iterator[Poly]:
    """Monic polynomials of degree d of the given class, in canonical order.

    kind is one of ``all``, ``squarefree``, ``irreducible``.
    """
    if d < 0:
        raise ValueError("degree must be >= 0")
    F = _as_field(ctx, base)
    if kind == "all":
        for t in monic_tuples(F, d):
            yield Poly(t, F)
    elif kind == "squarefree":
        for t in monic_tuples(F, d):
            if d <= 1 or len(p_gcd(F, t, p_deriv(F, t))) == 1:
                yield Poly(t, F)
    elif kind == "irreducible":
        if d == 0:
            return
        for t, _ in primes_of_degree(F, d):
            yield Poly(t, F)
    else:
        raise ValueError(f"unknown class {kind!r}")


# ---------------------------------------------------------- factorization

@dataclass(frozen=True)
class Factorization:
    unit: int
    factors: tuple[tuple[Poly, int], ...]

    @property
    def is_irreducible(self) -> bool:
        return len(self.factors) == 1 and self.factors[0][1] == 1

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def expand(self) -> Poly:
        F = None
        r: tuple[int, ...] = ()
        for P, e in self.factors:
            F = P.field
            r = p_mul(F, r or (1,), (P ** e).coeffs)
        if F is None:
            return None
        return Poly(p_scale(F, r, self.unit), F)


def _pth_root(F: Field, f) -> tuple[int, ...]:
    e = F.p ** (F.dim - 1)
    return _trim(F.power(f[i], e) for i in range(0, len(f), F.p))


def _squarefree_parts(F: Field, f) -> list[tuple[tuple, int]]:
    out: list[tuple[tuple, int]] = []
    if len(f) <= 1:
        return out
    df = p_deriv(F, f)
    if not df:
        for g, m in _squarefree_parts(F, _pth_root(F, f)):
            out.append((g, m * F.p))
        return out
    c = p_gcd(F, f, df)
    w = p_divmod(F, f, c)[0]
    i = 1
    while len(w) > 1:
        y = p_gcd(F, w, c)
        z = p_divmod(F, w, y)[0]
        if len(z) > 1:
            out.append((p_monic(F, z), i))
        i += 1
        w = y
        c = p_divmod(F, c, y)[0]
    if len(c) > 1:
        for g, m in _squarefree_parts(F, _pth_root(F, c)):
            out.append((g, m * F.p))
    return out


def _distinct_degree(F: Field, f) -> list[tuple[tuple, int]]:
    out = []
    h = (0, 1)
    d = 0
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = p_powmod(F, h, F.order, f)
        g = p_gcd(F, f, p_sub(F, h, (0, 1)))
        if len(g) > 1:
            out.append((g, d))
            f = p_divmod(F, f, g)[0]
            h = p_mod(F, h, f)
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def _equal_degree(F: Field, f, d: int, rng: random.Random) -> list[tuple]:
    n = len(f) - 1
    if n == d:
        return [f]
    e = (F.order ** d - 1) // 2
    while True:
        a = _trim(rng.randrange(F.order) for _ in range(n))
        if len(a) <= 1:
            continue
        b = p_sub(F, p_powmod(F, a, e, f), (1,))
        g = p_gcd(F, f, b)
        if 1 < len(g) < len(f):
            h = p_divmod(F, f, g)[0]
            return _equal_degree(F, g, d, rng) + _equal_degree(F, p_monic(F, h), d, rng)


def factorize(f: Poly) -> Factorization:
    """Complete factorization into monic primes (sorted canonically)."""
    if not f.coeffs:
        raise ValueError("cannot factor the zero polynomial")
    F = f.field
    unit = f.coeffs[-1]
    g = p_monic(F, f.coeffs)
    rng = random.Random(12345)
    acc: dict[tuple, int] = {}
    for part, mult in _squarefree_parts(F, g):
        for block, d in _distinct_degree(F, part):
            for pr in _equal_degree(F, block, d, rng):
                pr = p_monic(F, pr)
                acc[pr] = acc.get(pr, 0) + mult
    items = sorted(acc.items(), key=lambda t: (len(t[0]), p_code(F, t[0])))
    return Factorization(unit, tuple((Poly(pr, F), e) for pr, e in items))


def is_irreducible(f: Poly) -> bool:
    return is_irreducible_tuple(f.field, f.coeffs)


def von_mangoldt(f: Poly) -> int:
    if not f.is_monic():
        raise ValueError("von_mangoldt expects a monic polynomial")
    if f.degree < 1:
        return 0
    fac = factorize(f).factors
    return fac[0][0].degree if len(fac) == 1 else 0


def mobius(f: Poly) -> int:
    if not f.is_monic():
        raise ValueError("mobius expects a monic polynomial")
    if f.degree == 0:
        return 1
    fac = factorize(f)
    if not fac.is_squarefree:
        return 0
    return -1 if len(fac.factors) % 2 else 1


def embed_extension(f: Poly, ctx: FieldCtx) -> Poly:
    """Coefficient-wise embedding F_q[t] -> F_{q^2}[t]."""
    if f.field is not ctx.Fq:
        raise ValueError("polynomial is not over F_q")
    return Poly(f.coeffs, ctx.Fq2)


def _rank(F: Field, rows: list[list[int]]) -> int:
    rows = [list(r) for r in rows]
    rank, ncol = 0, len(rows[0]) if rows else 0
    for c in range(ncol):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = F.inv(rows[rank][c])
        rows[rank] = [F.mul(inv, v) for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def irreducible_count_frobenius(F: Field, e: int) -> int:
    """Monic irreducibles of degree e counted inside K = F[x]/(m), m irreducible.

    For d | e the fixed space of Frob^d on K has dimension e - rank(Frob^d - I);
    Moebius inversion over d gives the elements of exact degree e.
    """
    m = smallest_irreducible(F, e)
    Q = F.order
    fixed = {}
    for d in divisors(e):
        xf = p_powmod(F, (0, 1), Q ** d, m)
        cols, cur = [], (1,)
        for i in range(e):
            col = list(cur) + [0] * (e - len(cur))
            col[i] = F.sub(col[i], 1)
            cols.append(col)
            cur = p_mod(F, p_mul(F, cur, xf), m)
        fixed[d] = Q ** (e - _rank(F, cols))
    exact = sum(mobius_int(e // d) * fixed[d] for d in divisors(e))
    if exact % e:
        raise ArithmeticError("exact-degree element count not divisible by e")
    return exact // e


def von_mangoldt_total(ctx: FieldCtx, n: int, enum_limit: int = 20_000) -> int:
    """Sum of Lambda(f) over monic f of degree n, via prime counts by degree.

    Prime counts come from Frobenius-orbit enumeration while q**e stays below
    ``enum_limit`` and from Frobenius fixed-space dimensions beyond it.
    """
    total = 0
    for e in divisors(n):
        if ctx.q ** e <= enum_limit:
            cnt = len(primes_of_degree(ctx.Fq, e))
        else:
            cnt = irreducible_count_frobenius(ctx.Fq, e)
        total += e * cnt
    return total
