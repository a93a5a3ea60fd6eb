"""Seeded verification suites for the statements of the theory."""

from .cases import (HypothesisError, PropertyCase, SkipCase, VerificationReport, classify,
                    oriented_slack, report_from_json)
from .checks import (REGISTRY, VERIFY_GRID, check, check_blaschke, check_centroid_reciprocity,
                     check_extreme_chain, check_fubini_symmetry, check_measure_comparison,
                     check_monotone_centroid, check_proj_centroid_duality)
from .corpus import CorpusBody, CorpusEntry, gen_bodies, gen_corpus
from .engine import Engine
from .suite import SUITES, THEORY_IDS, SuiteConfig, UnknownSuiteError, run_suite, select

__all__ = [
    "HypothesisError", "PropertyCase", "SkipCase", "VerificationReport", "classify",
    "oriented_slack", "report_from_json", "REGISTRY", "VERIFY_GRID", "check", "check_blaschke",
    "check_centroid_reciprocity", "check_extreme_chain", "check_fubini_symmetry",
    "check_measure_comparison", "check_monotone_centroid", "check_proj_centroid_duality",
    "CorpusBody", "CorpusEntry", "gen_bodies", "gen_corpus", "Engine", "SUITES", "THEORY_IDS",
    "SuiteConfig", "UnknownSuiteError", "run_suite", "select",
]
