"""Finite inquisitive modal models: semantics, bisimulation, characteristic
formulae, first-order encodings and model transformations."""

__version__ = "0.1.0"

from .errors import (BudgetExhausted, CapExceeded, FormulaSyntaxError, InqError, ModelError,
                     S5Error, SignatureError, UnsupportedFormula)
from .model import (InqModel, InqState, KripkeModel, PointedModel, RelationalModel, Structure,
                    build_model, decode_relational, disjoint_sum, drop_empty_state,
                    encode_relational, kripke_reduct, sigma)
from .formula import parse, to_text, modal_depth
from .semantics import is_truth_conditional, kripke_truth, supports, truth
from .validate import Report, validate
from .bisim import compute_layers, distinguishing_play, equiv
from .charform import chi_inqstate, chi_state, chi_world, class_formula
from .fo import fo_ef_equiv, fo_eval, neighbourhood, standard_translate
from .transforms import Covering, rich_cover, simplify, stratify, verify_covering
from .epistemic import a_class, local_a_structure, threshold_equiv
