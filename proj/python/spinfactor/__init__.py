"""Spin-logic integer factorization: synthesis, circuit builder, annealers, exact oracle."""

from ._core import (
    CircuitLayout,
    ContractViolation,
    IsingModel,
    Relation,
    Schedule,
    SynthesisResult,
    anneal_once,
    apply_problem,
    build_factorizer,
    cq_triple,
    default_config,
    delta_energy,
    derive_seed,
    energy,
    ground_states,
    mu_relation,
    readout_factors,
    relation_from_rows,
    run_command,
    sample,
    synthesize,
    verify_degenerate_ground,
)

__all__ = [name for name in dir() if not name.startswith("_")]
