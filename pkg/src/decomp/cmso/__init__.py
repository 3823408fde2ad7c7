"""CMSO2 formulas, evaluation, transductions and the decomposition pipelines."""

from . import formulas
from .evaluate import DEFAULT_EVAL_GUARD, Evaluator, evaluate
from .parser import parse_formula
from .pipelines import (
    ancestor_output_matches,
    f_even_modules,
    f_even_modules_literal,
    labelled_modular_structure,
    modular_output_matches,
    pipeline_bipartition_laminar,
    pipeline_laminar_tree,
    pipeline_modular,
    pipeline_skeleton_guided,
    pipeline_split,
    pipeline_weakly_partitive_tree,
    sentence_even_modules,
    skeleton_output_matches,
    split_output_matches,
    unrooted_output_matches,
    wptree_output_matches,
)
from .transduction import (
    Colouring,
    Copying,
    Filtering,
    Interpretation,
    Pipeline,
    UniverseRestriction,
    apply_atom,
    run_pipeline,
)

__all__ = [
    "DEFAULT_EVAL_GUARD",
    "Evaluator",
    "evaluate",
    "parse_formula",
    "formulas",
    "Colouring",
    "Copying",
    "Filtering",
    "Interpretation",
    "Pipeline",
    "UniverseRestriction",
    "apply_atom",
    "run_pipeline",
    "pipeline_laminar_tree",
    "pipeline_weakly_partitive_tree",
    "pipeline_modular",
    "pipeline_bipartition_laminar",
    "pipeline_split",
    "pipeline_skeleton_guided",
    "sentence_even_modules",
    "labelled_modular_structure",
    "f_even_modules",
    "f_even_modules_literal",
    "ancestor_output_matches",
    "wptree_output_matches",
    "modular_output_matches",
    "unrooted_output_matches",
    "split_output_matches",
    "skeleton_output_matches",
]
