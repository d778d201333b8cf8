"""L-polynomials of order-ell characters: coefficients, completion, zeros, root number.

Coefficients c_n are kept as integer vectors over the exponent classes of
zeta_ell (exact elements of Z[zeta_ell]) and converted to complex once.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .characters import Character
from .config import DEFAULTS


class NonPrimitiveError(ValueError):
    pass


class RootFindingError(ArithmeticError):
    pass


_CYCLO = {1: (-1, 1), 2: (1, 1), 3: (1, 1, 1), 4: (1, 0, 1), 6: (1, -1, 1)}


def cyclo_reduce(vec, ell: int) -> list[int]:
    """Remainder of sum vec[j] x^j modulo the ell-th cyclotomic polynomial."""
    phi = _CYCLO[ell]
    k = len(phi) - 1
    r = [int(v) for v in vec]
    for i in range(len(r) - 1, k - 1, -1):
        c = r[i]
        if c:
            for j in range(k + 1):
                r[i - k + j] -= c * phi[j]
    return r[:k]


def cyclo_is_zero(vec, ell: int) -> bool:
    return not any(cyclo_reduce(vec, ell))


def roots_of_unity(ell: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(ell) / ell)


def classes_to_complex(classes: np.ndarray, ell: int) -> np.ndarray:
    """Rows of exponent-class counts (first ell columns used) to complex numbers."""
    cl = np.asarray(classes)[..., :ell].astype(np.float64)
    return cl @ roots_of_unity(ell)


@dataclass
class LData:
    chi: Character
    classes: np.ndarray          # class counts for c_0 .. c_{d(h)-1}
    coeffs: np.ndarray           # complex c_n
    d_h: int
    b: int
    completed_classes: np.ndarray
    completed: np.ndarray        # coefficients of Lambda(u) = L(u)/(1-u)^b
    zeros: np.ndarray | None = None   # angles theta_j in [0, 1)
    roots: np.ndarray | None = None   # u_j
    omega: complex | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.completed) - 1

    def to_json(self, character_id=None) -> dict:
        return {"character_id": character_id,
                "coeffs": [[float(z.real), float(z.imag)] for z in self.coeffs],
                "zeros": None if self.zeros is None else [float(t) for t in self.zeros],
                "omega": None if self.omega is None else [float(self.omega.real), float(self.omega.imag)],
                "residuals": {k: float(v) for k, v in self.residuals.items()}}


def l_coefficients(chi: Character, max_deg: int) -> tuple[np.ndarray, np.ndarray]:
    """(class counts, complex c_n) for n = 0..max_deg by direct character sums."""
    cc = chi.class_counts(max_deg + 1)
    return cc, classes_to_complex(cc, chi.ell)


def vanishing_check(chi: Character, extra: int = 2) -> bool:
    """c_n = 0 exactly in Z[zeta_ell] for d(h) <= n <= d(h)+extra."""
    dh = chi.conductor_degree
    cc = chi.class_counts(dh + extra + 1)
    return all(cyclo_is_zero(cc[n, :chi.ell], chi.ell) for n in range(dh, dh + extra + 1))


def l_polynomial(chi: Character) -> LData:
    """L-polynomial of degree d(h)-1 and its completion (division by (1-u) when even)."""
    dh = chi.conductor_degree
    b = chi.b
    cc = chi.class_counts(dh)
    ell = chi.ell
    exact = cc[:, :ell].astype(object)
    if b:
        cum = np.cumsum(exact, axis=0)
        if not cyclo_is_zero(cum[-1], ell):
            raise NonPrimitiveError("(1-u) does not divide the L-polynomial of an even character")
        comp = cum[:-1]
    else:
        comp = exact
    if cyclo_is_zero(comp[-1], ell) and len(comp) > 1:
        raise NonPrimitiveError("L-polynomial has lower degree than the conductor predicts")
    return LData(chi=chi, classes=cc, coeffs=classes_to_complex(cc, ell), d_h=dh, b=b,
                 completed_classes=np.array(comp, dtype=np.int64),
                 completed=classes_to_complex(np.array(comp, dtype=np.float64), ell))


def _newton(coeffs: np.ndarray, u: np.ndarray, steps: int = 3) -> np.ndarray:
    m = len(coeffs) - 1
    dc = coeffs[1:] * np.arange(1, m + 1)
    for _ in range(steps):
        f = np.polyval(coeffs[::-1], u)
        df = np.polyval(dc[::-1], u)
        ok = df != 0
        u = np.where(ok, u - f / np.where(ok, df, 1), u)
    return u


def _derivative(coeffs: np.ndarray, k: int) -> np.ndarray:
    c = np.asarray(coeffs)
    for _ in range(k):
        c = c[1:] * np.arange(1, len(c))
    return c


def _rel_value(coeffs: np.ndarray, u: complex) -> float:
    scale = np.sum(np.abs(coeffs) * abs(u) ** np.arange(len(coeffs)))
    return abs(np.polyval(coeffs[::-1], u)) / scale if scale else 0.0


def _poly_roots(coeffs: np.ndarray, scale: float, cluster: float = 1e-4) -> np.ndarray:
    """Roots of sum coeffs[k] u^k via the companion matrix of the rescaled
    polynomial in v = scale*u, then Newton polishing in u.

    Eigenvalues within ``cluster`` (relative, single linkage) are treated as
    one root of multiplicity k: the centroid is polished as a simple root of
    the (k-1)-th derivative, which removes the eps**(1/k) loss of plain
    eigenvalues.  The cluster is kept only if the lower derivatives vanish
    there too; otherwise its members are polished one by one.
    """
    m = len(coeffs) - 1
    a = coeffs * scale ** (-np.arange(m + 1))
    u = np.roots(a[::-1]) / scale
    r0 = 1.0 / scale
    groups: list[list[int]] = []
    for i in range(m):
        hit = [g for g in groups if any(abs(u[i] - u[j]) < cluster * r0 for j in g)]
        merged = [i]
        for g in hit:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)
    out = np.empty(m, dtype=complex)
    for g in groups:
        k = len(g)
        if k > 1:
            c = _newton(_derivative(coeffs, k - 1), np.array([np.mean(u[g])]))[0]
            if all(_rel_value(_derivative(coeffs, j), c) < 1e-14 for j in range(k - 1)):
                out[g] = c
                continue
        out[g] = _newton(coeffs, u[g])
    return out


def zeros_and_angles(L: LData, tol: float | None = None) -> LData:
    """Roots u_j of the completed polynomial and angles theta_j = -arg(u_j)/2pi mod 1."""
    tol = DEFAULTS["root_tol"] if tol is None else tol
    q = L.chi.ctx.q
    m = L.degree
    if m == 0:
        L.roots = np.zeros(0, dtype=complex)
        L.zeros = np.zeros(0)
        L.residuals.update(root_residual=0.0, circle_deviation=0.0)
        return L
    u = _poly_roots(L.completed, np.sqrt(q))
    absu = np.abs(u)
    scale = np.array([np.sum(np.abs(L.completed) * a ** np.arange(m + 1)) for a in absu])
    res = np.abs(np.polyval(L.completed[::-1], u)) / scale
    rres = float(res.max())
    if rres > tol:
        raise RootFindingError(f"root residual {rres:.3e} exceeds {tol:.1e}")
    theta = np.mod(-np.angle(u) / (2 * np.pi), 1.0)
    order = np.argsort(theta)
    L.roots = u[order]
    L.zeros = theta[order]
    L.residuals.update(root_residual=rres,
                       circle_deviation=float(np.max(np.abs(absu - q ** -0.5))))
    return L


def lfunction(chi: Character, tol: float | None = None) -> LData:
    return zeros_and_angles(l_polynomial(chi), tol)


def completed_eval(coeffs: np.ndarray, u) -> np.ndarray:
    return np.polyval(np.asarray(coeffs)[::-1], u)


def functional_equation_check(L: LData, L_conj: LData | None = None,
                              npts: int = 16) -> tuple[complex, float]:
    """(omega, max residual) of Lambda(u,chi) = omega (sqrt(q) u)^m Lambda(1/(qu), conj chi).

    The residual is taken relative to |Lambda(u, chi)| on a circle of radius
    0.9 q^{-1/2}; conj chi's polynomial is the coefficient-wise conjugate
    unless ``L_conj`` is supplied.
    """
    q = L.chi.ctx.q
    m = L.degree
    if m == 0:
        L.omega = 1.0 + 0j
        L.residuals["fe_residual"] = 0.0
        L.residuals["omega_modulus_deviation"] = 0.0
        return L.omega, 0.0
    pc = L.completed
    pbar = np.conj(pc) if L_conj is None else L_conj.completed
    u = 0.9 * q ** -0.5 * np.exp(2j * np.pi * (np.arange(npts) + 0.5) / npts)
    lhs = completed_eval(pc, u)
    rhs0 = (np.sqrt(q) * u) ** m * completed_eval(pbar, 1.0 / (q * u))
    ratios = lhs / rhs0
    omega = complex(np.mean(ratios))
    res = float(np.max(np.abs(lhs - omega * rhs0) / np.maximum(1.0, np.abs(lhs))))
    L.omega = omega
    L.residuals["fe_residual"] = res
    L.residuals["omega_modulus_deviation"] = abs(abs(omega) - 1.0)
    return omega, res
