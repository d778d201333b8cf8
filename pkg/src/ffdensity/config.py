"""Numerical defaults shared by every module and echoed into reports."""

from contextlib import contextmanager

DEFAULTS = {
    "epsilon": 0.1,           # free epsilon in the error budgets
    "budget_constant": 10.0,  # implied constant in the error budgets
    "euler_cutoff": 30,       # max prime degree in truncated Euler products
    "euler_tol": 1e-12,       # target for the omitted log-tail
    "root_tol": 1e-10,        # relative residual allowed for polynomial roots
    "fd_step": 1e-6,          # central finite-difference step
    "identity_tol": 1e-8,     # exact-identity gates (explicit formula, RH, |omega|)
    "direct_prime_limit": 20_000,  # q**e above which prime classes come from the recursion
    "seed": 20240101,
}


@contextmanager
def override(**kw):
    """Temporarily replace entries of DEFAULTS (unknown keys are rejected)."""
    unknown = set(kw) - set(DEFAULTS)
    if unknown:
        raise KeyError(f"unknown config keys: {sorted(unknown)}")
    saved = dict(DEFAULTS)
    DEFAULTS.update({k: v for k, v in kw.items() if v is not None})
    try:
        yield DEFAULTS
    finally:
        DEFAULTS.clear()
        DEFAULTS.update(saved)
