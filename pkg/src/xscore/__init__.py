"""Explanation scores for classifiers, plus diagnosis and database causality."""

from .circuit import (Circuit, CircuitBuilder, brute_force_count, check_decomposable,
                      check_deterministic, count_by_distance, evaluate, model_count)
from .classifier import Classifier, Distribution
from .compile import binarize_dt, compile_dt, parse_cnf, parse_dt
from .dbcausality import Instance, causes, cbd_encoding, eval_cq, parse_query
from .diagnosis import AbductionProblem, CausalSetting, DiagnosisProblem, abduce, actual_causes_logical, diagnoses
from .errors import CapExceeded, ParseError, PreconditionError, XScoreError
from .resp import resp_global, resp_local
from .shapley import shap_brute, shap_exact, shapley
from .space import FeatureSpace

__version__ = "0.1.0"
