"""Python access to the symgap experiment library."""

import json

from ._core import (
    ConstructionError,
    DomainError,
    Oracle,
    RangeError,
    UsageError,
    additive,
    budget_additive,
    coverage,
    custom,
    exhaustive_opt_cpp,
    experiment_names,
    f_exp,
    gap_instance,
    greedy_cpp,
    multilinear_F,
    phi_alpha,
    polar,
    product,
    psi,
    psi_tilde,
    symgap_valuation,
    vcg_auction,
)
from . import _core


def descriptor(f):
    return json.loads(f.descriptor_json())


def from_descriptor(d):
    return _core.from_descriptor_json(json.dumps(d))


def check_monotone_submodular(f, sampled=False, samples=100000, seed=0):
    return json.loads(_core.check_monotone_submodular_json(f, sampled, samples, seed))


def poisson_midr(f, k, force=False):
    return json.loads(_core.poisson_midr_json(f, k, force))


def separate_quadrant(points, target):
    return json.loads(_core.separate_quadrant_json(points, target))


def run_experiment(name, params=None, seed=1, workers=1):
    """Run a named experiment; returns the report as a dict."""
    return json.loads(_core.run_experiment_json(name, json.dumps(params or {}), seed, workers))
