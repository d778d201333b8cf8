"""One-level density of zeros of order-ell Dirichlet L-functions over F_q[t]."""

__version__ = "0.1.0"
