"""reconlab: two-stage limited-precision LDPC reconciliation testbed.

Subpackages map to the pipeline stages: ``codes`` (GF(2) matrices and
alist I/O), ``fixedpoint`` (saturating fixed-point arithmetic),
``decoder`` (layered BP stage 1), ``corrector`` (peeling stage 2),
``simulate`` (seeded Monte Carlo FER sweeps), ``skr`` (finite-size key-rate
model), and ``cli`` (the experiment harness). Hot loops live in a compiled
backend with a pure-Python fallback; see ``reconlab.kernels``.
"""

__version__ = "0.1.0"
