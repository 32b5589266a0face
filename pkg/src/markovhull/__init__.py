"""Exact Markovianisation of measures on finite path spaces."""

from .disintegration import Disintegration, disintegrate, reassemble
from .errors import (
    ContractError,
    EnumerationTooLarge,
    FormatError,
    GluingError,
    InvarianceError,
    MarkovHullError,
    PinError,
)
from .groups import FiniteGroup, GroupAction, group_average, haar, is_translation_invariant, translate_measure
from .hull import SubsetOrdering, aggregate_metric, pseudo_metric, run_hull, verify_hull_element
from .markov import (
    chain_product_oracle,
    is_markov,
    is_strong_markov,
    markov_defect,
    markovianise_at,
    markovianise_at_point,
    markovianise_set,
)
from .measures import CylinderFunction, PartialPathMeasure, PathMeasure, StateMeasure, marginal_at, tv_distance
from .paths import Interval, PathSpace, StateSpace, TimeGrid
from .tensor import PinnedMeasure, tensor, tensor_at

__all__ = [name for name in dir() if not name.startswith("_")]
