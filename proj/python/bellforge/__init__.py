"""Python access to the bellforge simulator and certification checks."""

import json

from . import _bellforge as _core
from ._bellforge import (
    Strategy,
    base_set_bound,
    conjugate,
    correlator_bound,
    densify,
    depolarize,
    honest_strategy,
    operator_norm,
    pauli,
    question_set,
    reduced_set,
    regularize,
    run,
    strategy_from_json,
)


def audit(strategy, specials):
    return json.loads(_core.audit_json(strategy, list(specials)))


def sampled_audit(strategy, specials, trials, seed, alpha=0.01):
    return json.loads(_core.sampled_audit_json(strategy, list(specials), trials, seed, alpha))


def relations(strategy, specials, chi, epsilon):
    return json.loads(_core.relations_json(strategy, list(specials), chi, epsilon))


def isometry(strategy, specials, chi):
    return json.loads(_core.isometry_json(strategy, list(specials), chi))


def prepare(strategy, specials, chi):
    return json.loads(_core.prepare_json(strategy, list(specials), chi))


__all__ = [
    "Strategy",
    "audit",
    "base_set_bound",
    "conjugate",
    "correlator_bound",
    "densify",
    "depolarize",
    "honest_strategy",
    "isometry",
    "operator_norm",
    "pauli",
    "prepare",
    "question_set",
    "reduced_set",
    "regularize",
    "relations",
    "run",
    "sampled_audit",
    "strategy_from_json",
]
