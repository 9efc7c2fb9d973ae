"""Rank tests, minimizer extraction, certificates and optimality checks."""
from .certificate import Certificate, CertificateCheck, recover_certificate, verify_certificate
from .extract import (AtomSet, ExtractionError, MinimizerSet, assemble_minimizers,
                      extract_atoms)
from .hierarchy import HierarchyOptions, HierarchyResult, run_hierarchy
from .optimality import (CliqueSecondOrder, FOOCReport, SecondOrderReport, fooc_residual,
                         second_order_check)
from .rank import FlatReport, RankReport, evaluate_rank, flat_truncation_check
from .sosconvex import SOSConvexityResult, sos_convexity_test

__all__ = [
    "AtomSet", "Certificate", "CertificateCheck", "CliqueSecondOrder", "ExtractionError",
    "FOOCReport", "FlatReport", "HierarchyOptions", "HierarchyResult", "MinimizerSet",
    "RankReport", "SOSConvexityResult", "SecondOrderReport", "assemble_minimizers",
    "evaluate_rank", "extract_atoms", "flat_truncation_check", "fooc_residual",
    "recover_certificate", "run_hierarchy", "second_order_check", "sos_convexity_test",
    "verify_certificate",
]
