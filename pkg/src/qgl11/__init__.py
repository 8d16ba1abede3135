"""Exact symbolic verification of the three (1|1) matrix-bialgebra
deformations: quantum-plane presentations, duality pairings, enveloping
duals, coefficient-polynomial identities, and a check registry with a
CLI harness.

All arithmetic is exact — either rational functions in the deformation
parameters (with one adjoined square root) or plain rationals at seeded
assignments — so every verdict is a theorem about the stated identity,
not a numerical approximation.
"""
from __future__ import annotations

from .scalars import (
    SymbolicField, NumericField, PoleError, parse_scalar, scalar_to_str,
    random_numeric_field, to_field,
)
from .plane import (
    Presentation, presentation, RMatrix, builtin_rmatrix, case_rmatrix,
    perturb_rmatrix, ybe_check, frt_relations, check_frt_consistency,
    confluence_probe, rewrite_graph_acyclic, pbw_normalize, gmul,
    mono_elem, elem_add, elem_sub, elem_scale, elem_eq, element_to_str,
    closed_product_r12, reordered_odd_product, LEMMA2_FACTORS,
    LEMMA2_ZERO_FACTORS, RewriteLimitError,
)
from .pairing import (
    GLAtom, gl_atom, k_atom, l_atom, eta_atom, group_like, pair,
    parse_dual, dual_add, dual_sub, dual_scale, dual_mul, dual_to_str,
    relation_check, coproduct_check, dual_relation_suite,
    dual_delta_table, pair_table_r12, delta_pair_table_r12,
    delta_pair_table_r11, commutator_pair_table_r11, dual_route_r11,
    PairCheckResult,
)
from .coproduct import (
    delta, delta_elem, delta_n, counit, tensor_add, tensor_sub,
    tensor_eq, tensor_to_str, CoeffPoly, extract_coeff_polys, TAGS,
    FLAGGED_ODD_ENTRIES, predicted_odd_table, predicted_k_step,
    lemA1_value, evaluated_step_increment, closed_delta_r12,
    ones_point, meps_point, eval_coeff,
)
from .enveloping import (
    EnvPresentation, env_presentation, env_mul, env_delta_table,
    env_delta_mono, env_counit, hom_check, coassoc_check,
    env_confluence_probe, classical_limit_check, basis_change_check_r12,
    basis_change_check_r11, env_to_dual_word, env_elem_to_dual,
)
from .report import (
    CheckReport, build_suite_report, suite_to_json, suite_from_json,
)
from .registry import (
    SuiteConfig, ConfigError, list_checks, get_check, run_check,
    run_suite, CASES, FRAMEWORKS,
)

__version__ = "0.1.0"
