"""One-level density of zeros over a family: two empirical paths, the
theorem-side prediction, error budgets, a random-matrix baseline and reports.

Normalization: a test function is stored as phi_hat(0..N) and the scaled
transform is realized as Phi_hat(n/(D-2)) = (D-2) * phi_hat(n), so that
Sum_j Phi((D-2) theta_j) = Sum_j phi(theta_j).
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .characters import KUMMER, Character, FamilySpec, build_family
from .config import DEFAULTS
from .euler import ZETA3, c_Q, constants, quartic_G
from .explicit import prime_classes, prime_power_side
from .gfpoly import divisors, prime_count
from .lfunc import LData, lfunction

MAX_N = 60


@dataclass(frozen=True)
class TestFunction:
    N: int
    phi_hat: tuple[float, ...]

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if len(self.phi_hat) != self.N + 1:
            raise ValueError("phi_hat must hold N+1 coefficients phi_hat(0..N)")
        if any(not math.isfinite(c) for c in self.phi_hat):
            raise ValueError("phi_hat coefficients must be finite reals")

    @classmethod
    def plain(cls, N: int, value: float = 1.0) -> TestFunction:
        """phi_hat(n) = value for |n| <= N."""
        return cls(N, tuple([float(value)] * (N + 1)))

    @classmethod
    def from_scaled(cls, N: int, D: int, Phi_hat=lambda y: 1.0) -> TestFunction:
        """Hold the scaled transform fixed: phi_hat(n) = Phi_hat(n/(D-2)) / (D-2)."""
        m = D - 2
        return cls(N, tuple(float(Phi_hat(n / m)) / m for n in range(N + 1)))

    @classmethod
    def from_json(cls, obj) -> TestFunction:
        if isinstance(obj, str):
            obj = json.loads(obj)
        coeffs = [float(c) for c in obj["coeffs"]]
        return cls(int(obj["N"]), tuple(coeffs))

    def to_json(self) -> dict:
        return {"N": self.N, "coeffs": list(self.phi_hat)}

    def coeff(self, n: int) -> float:
        n = abs(n)
        return self.phi_hat[n] if n <= self.N else 0.0

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, self.phi_hat[0])
        for n in range(1, self.N + 1):
            out = out + 2 * self.phi_hat[n] * np.cos(2 * np.pi * n * theta)
        return out

    def complex_eval(self, theta) -> np.ndarray:
        """Sum_{|n| <= N} phi_hat(n) e(n theta) without using evenness."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for n in range(-self.N, self.N + 1):
            out = out + self.coeff(n) * np.exp(2j * np.pi * n * theta)
        return out

    def Phi_hat(self, n: int, D: int) -> float:
        """Phi_hat(n/(D-2)) under the stored normalization."""
        return (D - 2) * self.coeff(n)


@dataclass
class FamilyData:
    """A family with its characters and lazily computed L-data."""
    spec: FamilySpec
    chars: list[Character]
    ldata: list[LData] | None = None

    @classmethod
    def build(cls, spec: FamilySpec) -> FamilyData:
        return cls(spec, build_family(spec))

    @property
    def size(self) -> int:
        return len(self.chars)

    def compute_zeros(self, tol: float | None = None, threads: int = 1) -> list[LData]:
        if self.ldata is None:
            if threads > 1:
                with ThreadPoolExecutor(threads) as ex:
                    self.ldata = list(ex.map(lambda c: lfunction(c, tol), self.chars))
            else:
                self.ldata = [lfunction(c, tol) for c in self.chars]
        return self.ldata


def _D(fam) -> int:
    return fam.spec.D


def empirical_density_zeros(fam: FamilyData, tf: TestFunction, details: bool = False):
    """(1/|C|) Sum_F Sum_j phi(theta_{j,F})."""
    if fam.ldata is None:
        raise ValueError("zeros have not been computed for this family")
    tot = 0j
    for L in fam.ldata:
        if L.zeros is None:
            raise ValueError("a family member is missing its zeros")
        tot += complex(np.sum(tf.complex_eval(L.zeros)))
    val = tot / fam.size
    if details:
        D = _D(fam)
        return {"value": float(val.real), "imag_residue": float(abs(val.imag)),
                "per_zero": float(val.real) / (D - 2)}
    return float(val.real)


def family_prime_power_sums(fam: FamilyData, N: int) -> list[tuple[complex, complex]]:
    """Family averages of (S_n(chi), S_n(conj chi)) for n = 1..N (index 0 unused).

    S_n(conj chi) comes from prime_power_side at -n, so the pairing is computed
    rather than assumed.
    """
    acc = [(0j, 0j)] * (N + 1)
    if N == 0:
        return acc
    pos = [0j] * (N + 1)
    neg = [0j] * (N + 1)
    for chi in fam.chars:
        P = prime_classes(chi, N)
        for n in range(1, N + 1):
            pos[n] += prime_power_side(chi, n, P)
            neg[n] += prime_power_side(chi, -n, P)
    return [(pos[n] / fam.size, neg[n] / fam.size) for n in range(N + 1)]


def empirical_density_charsums(fam: FamilyData, tf: TestFunction, details: bool = False,
                               sums: list | None = None):
    """Phi_hat(0) - (1/(D-2)) Sum_n Phi_hat(n/(D-2)) (1/|C|) Sum_F [S_n(chi) + S_n(conj chi)].

    S_n already carries b/q^{n/2}, which is the trivial-zero term of an even
    family.
    """
    D = _D(fam)
    N = tf.N
    if sums is None:
        sums = family_prime_power_sums(fam, N)
    val = complex(tf.Phi_hat(0, D))
    for n in range(1, N + 1):
        sp, sn = sums[n]
        val -= tf.coeff(n) * complex(sp + sn)
    if details:
        return {"value": float(val.real), "imag_residue": float(abs(val.imag))}
    return float(val.real)


def _prime_pair_sum(q: int, n: int, weight) -> complex:
    """Sum over pairs (Q, r) with r d(Q) = n of weight(e = d(Q)), by degree classes."""
    return sum(prime_count(q, e) * weight(e) for e in divisors(n))


@dataclass
class Prediction:
    predicted: float
    phi_hat0: float
    trivial_term: float = 0.0
    main_sum: float = 0.0
    h1_term: float = 0.0
    h2_or_s2_term: float = 0.0
    imag_residue: float = 0.0
    constants: dict = field(default_factory=dict)


def predict_density(spec: FamilySpec, tf: TestFunction, family_size: float | None = None,
                    cutoff: int | None = None) -> Prediction:
    """Right-hand side of the one-level density theorem for the family."""
    if tf.N > MAX_N:
        raise ValueError(f"band limit N={tf.N} exceeds the configured maximum {MAX_N}")
    q, ell, g = spec.ctx.q, spec.ell, spec.genus
    D = spec.D
    ph0 = tf.Phi_hat(0, D)
    pr = Prediction(predicted=0.0, phi_hat0=ph0)
    nmax = tf.N // ell
    if spec.setting == KUMMER and ell == 3:
        cst = constants(spec, family_size, cutoff)
        h1, h2 = cst["h1"], cst["h2"]
        main = tw = sec = 0j
        for n in range(1, nmax + 1):
            w = tf.coeff(3 * n)
            den = lambda e: q ** (1.5 * n) * (1 + 2 * q ** -e)
            main += w * _prime_pair_sum(q, n, lambda e: e / den(e))
            tw += w * _prime_pair_sum(q, n, lambda e: e * (1 - c_Q(e, q)) / den(e))
            sec += w * _prime_pair_sum(q, n, lambda e: 2 * e * e * q ** -e
                                       / (q ** (1.5 * n) * (1 + 2 * q ** -e) ** 2))
        pr.main_sum = -2 * main.real
        pr.h1_term = 4 * (h1 * tw).real
        pr.h2_or_s2_term = 2 * (h2 * sec).real
        pr.imag_residue = max(abs(main.imag), abs((h2 * sec).imag))
        pr.constants = cst
    elif spec.setting == KUMMER and ell == 4:
        cst = constants(spec, family_size, cutoff)
        s2 = cst["s2"]
        main = sec = 0.0
        for n in range(1, nmax + 1):
            w = tf.coeff(4 * n)
            main += w * _prime_pair_sum(q, n, lambda e: e / (q ** (2 * n) * (1 + 2 * q ** -e))).real
            sec += w * _prime_pair_sum(q, n, lambda e: 2 * e * e * q ** -e
                                       / (q ** (2 * n) * (1 + 2 * q ** -e) ** 2)).real
        pr.main_sum = -2 * main
        pr.h2_or_s2_term = -2 * s2 * sec
        pr.constants = cst
    else:
        pr.trivial_term = -2 * sum(tf.coeff(n) * q ** (-n / 2) for n in range(1, tf.N + 1))
        main = 0.0
        for n in range(1, nmax + 1):
            w = tf.coeff(ell * n)

            def wt(e, n=n):
                m = math.gcd(e, 2)
                return e / (q ** (ell * n / 2) * (1 + q ** (-2 * e / m)) ** m)
            main += w * _prime_pair_sum(q, n, wt).real
        pr.main_sum = -2 * main
        pr.constants = {"family_size": family_size}
    pr.predicted = pr.phi_hat0 + pr.trivial_term + pr.main_sum + pr.h1_term + pr.h2_or_s2_term
    return pr


def error_budget(spec: FamilySpec, N: int, constant: float | None = None,
                 eps: float | None = None) -> float:
    """C q^{N/2} q^{-d/2} q^{eps N} with d = g (cubic), G (quartic);
    C q^{N/2} q^{-D/2} q^{eps (N+g)} for non-Kummer families."""
    constant = DEFAULTS["budget_constant"] if constant is None else constant
    eps = DEFAULTS["epsilon"] if eps is None else eps
    q, g = spec.ctx.q, spec.genus
    if spec.setting == KUMMER:
        d = g if spec.ell == 3 else quartic_G(g)
        return constant * q ** (N / 2 - d / 2 + eps * N)
    return constant * q ** (N / 2 - spec.D / 2 + eps * (N + g))


def haar_unitary(M: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary: QR of a complex Gaussian matrix with the phases of diag(R) removed."""
    Z = (rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))) / math.sqrt(2)
    Qm, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Qm * (d / np.abs(d))


def _rmt_sample(M: int, tf: TestFunction, seed: int, trial: int) -> float:
    rng = np.random.default_rng([seed, trial])
    U = haar_unitary(M, rng)
    theta = np.angle(np.linalg.eigvals(U)) / (2 * math.pi)
    return float(np.sum(tf(theta)))


def rmt_baseline(M: int, tf: TestFunction, trials: int, seed: int | None = None,
                 threads: int = 1) -> tuple[float, float]:
    """Monte Carlo mean and standard error of Sum_j phi(theta_j) over Haar U(M)."""
    if M < 1 or trials < 1:
        raise ValueError("M and trials must be positive")
    seed = DEFAULTS["seed"] if seed is None else seed
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            vals = list(ex.map(lambda t: _rmt_sample(M, tf, seed, t), range(trials)))
    else:
        vals = [_rmt_sample(M, tf, seed, t) for t in range(trials)]
    arr = np.array(vals)
    mean = float(np.sum(arr) / trials)
    se = float(np.std(arr, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, se


def conjugate_pair_statistic(fam: FamilyData, tf: TestFunction) -> float:
    """Zero statistic using one member of each conjugate pair, doubled.

    Only meaningful for conjugation-closed (non-Kummer) families.
    """
    if fam.ldata is None:
        raise ValueError("zeros have not been computed for this family")
    index = {c.key(): i for i, c in enumerate(fam.chars)}
    seen, tot, count = set(), 0.0, 0
    for i, chi in enumerate(fam.chars):
        if i in seen:
            continue
        j = index.get(chi.conjugate().key())
        if j is None:
            raise ValueError("family is not closed under conjugation")
        seen.update((i, j))
        s = float(np.sum(tf(fam.ldata[i].zeros)))
        if j == i:
            tot += s
            count += 1
        else:
            tot += 2 * s
            count += 2
    return tot / count


CSV_COLUMNS = ["q", "ell", "setting", "g", "N", "family_size", "empirical_zeros",
               "empirical_charsums", "predicted", "phi_hat0", "trivial_term", "main_sum",
               "h1_term", "h2_or_s2_term", "error_budget", "pass"]


@dataclass
class DensityReport:
    q: int
    ell: int
    setting: str
    g: int
    N: int
    family_size: int
    empirical_zeros: float
    empirical_charsums: float
    predicted: float
    phi_hat0: float
    trivial_term: float
    main_sum: float
    h1_term: float
    h2_or_s2_term: float
    error_budget: float
    path_gap: float
    deviation: float
    imag_residue: float
    unitary_regime: bool
    limit_check: bool | None
    notes: list[str]
    passed: bool
    normalization: str = "Phi_hat(n/(D-2)) = (D-2) phi_hat(n)"

    def row(self) -> dict:
        d = {k: getattr(self, k) for k in CSV_COLUMNS if k != "pass"}
        d["pass"] = "PASS" if self.passed else "FAIL"
        return d

    def to_json(self, config: dict | None = None) -> dict:
        out = asdict(self)
        out["pass"] = "PASS" if self.passed else "FAIL"
        if config is not None:
            out["config"] = config
        return out


def compare(fam: FamilyData, tf: TestFunction, prediction: Prediction | None = None,
            spec: FamilySpec | None = None, constant: float | None = None,
            eps: float | None = None, threads: int = 1) -> DensityReport:
    """Empirical (both paths) against the prediction, with PASS/FAIL flags."""
    if spec is not None and spec.label() != fam.spec.label():
        raise ValueError("prediction and family were built from different specs")
    spec = fam.spec
    fam.compute_zeros(threads=threads)
    ez = empirical_density_zeros(fam, tf, details=True)
    ec = empirical_density_charsums(fam, tf, details=True)
    if prediction is None:
        prediction = predict_density(spec, tf, family_size=fam.size)
    budget = error_budget(spec, tf.N, constant, eps)
    gap = abs(ez["value"] - ec["value"])
    dev = abs(ez["value"] - prediction.predicted)
    imag = max(ez["imag_residue"], ec["imag_residue"], prediction.imag_residue)
    unitary = tf.N < spec.D - 2
    notes = []
    limit = None
    if unitary:
        limit = abs(ez["value"] - prediction.phi_hat0) <= abs(prediction.predicted - prediction.phi_hat0) + budget
    else:
        notes.append("support exceeds unitary regime")
    passed = (gap <= DEFAULTS["identity_tol"] and dev <= budget and imag <= 1e-10
              and limit is not False)
    return DensityReport(q=spec.ctx.q, ell=spec.ell, setting=spec.setting, g=spec.genus, N=tf.N,
                         family_size=fam.size, empirical_zeros=ez["value"],
                         empirical_charsums=ec["value"], predicted=prediction.predicted,
                         phi_hat0=prediction.phi_hat0, trivial_term=prediction.trivial_term,
                         main_sum=prediction.main_sum, h1_term=prediction.h1_term,
                         h2_or_s2_term=prediction.h2_or_s2_term, error_budget=budget,
                         path_gap=gap, deviation=dev, imag_residue=imag, unitary_regime=unitary,
                         limit_check=limit, notes=notes, passed=passed)


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v) + 0.0)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def reports_to_csv(reports: list[DensityReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow({k: _cell(v) for k, v in r.row().items()})
    return buf.getvalue()


__all__ = ["TestFunction", "FamilyData", "Prediction", "DensityReport", "empirical_density_zeros",
           "empirical_density_charsums", "family_prime_power_sums", "predict_density",
           "error_budget", "rmt_baseline", "haar_unitary", "conjugate_pair_statistic", "compare",
           "reports_to_csv", "CSV_COLUMNS", "ZETA3"]
