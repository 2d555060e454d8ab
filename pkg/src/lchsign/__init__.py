"""Orientation sign bookkeeping and DGA tools for Legendrian contact homology."""
from .dga_core import (Augmentation, Chord, Dga, DgaError, DgaMorphism, Element, Stabilization, Substitution,
                       apply_tame_moves, augmentation_check, capping_change_morphism, check_chain_map, compose,
                       d_squared_report, grading_validate, homology_ranks, identity_morphism,
                       linearized_differential)
from .graded_lines import (ExactSequenceData, FormalSummand, StructureError, SummandColumn, block_reorder_oracle,
                           block_reorder_sign, exact_sequence_oracle, exact_sequence_transport, koszul_sign)
from .ingest import (CobordismDocument, DgaDocument, ParseError, parse_augmentation, parse_cobordism, parse_dga,
                     parse_dga_document, serialize_dga, serialize_morphism)
from .scenario_verifier import (CappingSystemParams, ScenarioError, SweepConfig, chainmap_T_sign,
                                chainmap_Ttilde_sign, conformal_glue_ledger, dsquared_rearrangement_sign, run_sweep,
                                trivial_cobordism_sign)

__version__ = "0.1.0"
