"""Dual certificate construction, decomposition and exact checks."""
from __future__ import annotations

from .checks import (
    AxiomReport,
    DegenerateCertificateError,
    GramReport,
    KernelReport,
    NotPSDError,
    check_axioms,
    check_kernel_vectors,
    gram_feasibility,
)
from .filled import (
    Decomposition,
    FilledParts,
    band,
    build_exm,
    build_expectation,
    build_l,
    build_m_prime,
    build_m_prime_bruteforce,
    build_r_a,
    decompose,
    filled_parts,
    lift,
    r_a_operator,
)
from .io import MatrixDump, dump_matrix, format_rational, load_matrix
from .moments import (
    DegreeTable,
    MomentFunctional,
    build_full_moment_matrix,
    build_grigoriev,
    build_m,
    clique_rows,
    full_index,
    moment_value,
)
from .params import CertificateParams, DegenerateCertificateWarning

__all__ = [
    "AxiomReport",
    "CertificateParams",
    "Decomposition",
    "DegenerateCertificateError",
    "DegenerateCertificateWarning",
    "DegreeTable",
    "FilledParts",
    "GramReport",
    "KernelReport",
    "MatrixDump",
    "MomentFunctional",
    "NotPSDError",
    "band",
    "build_exm",
    "build_expectation",
    "build_full_moment_matrix",
    "build_grigoriev",
    "build_l",
    "build_m",
    "build_m_prime",
    "build_m_prime_bruteforce",
    "build_r_a",
    "check_axioms",
    "check_kernel_vectors",
    "clique_rows",
    "decompose",
    "dump_matrix",
    "filled_parts",
    "format_rational",
    "full_index",
    "gram_feasibility",
    "lift",
    "load_matrix",
    "moment_value",
    "r_a_operator",
]
