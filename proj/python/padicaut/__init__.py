"""p-adic tools for finite and nilpotent groups of polynomial automorphisms."""

import json

from . import _core
from ._core import BudgetError, CertificateError, InputError, PrecisionError, __version__, prime_search

__all__ = [
    "BudgetError",
    "CertificateError",
    "InputError",
    "PrecisionError",
    "__version__",
    "bounds",
    "flow",
    "linearize",
    "optimal_group",
    "prime_search",
    "theorem_b_exp_family",
    "unitri_series",
    "vdl_witness",
]


def bounds(d, p, field="Q"):
    return json.loads(_core.bounds(d, p, field))


def optimal_group(d, p, field="Q"):
    return json.loads(_core.optimal_group(d, p, field))


def linearize(text, p):
    return json.loads(_core.linearize(text, p))


def flow(text, p, precision=12, degree=8, t_degree=10):
    return json.loads(_core.flow(text, p, precision, degree, t_degree))


def unitri_series(n, gens, modulus):
    return json.loads(_core.unitri_series(n, list(gens), str(modulus)))


def vdl_witness(n):
    return json.loads(_core.vdl_witness(n))


def theorem_b_exp_family(n, p=3):
    return json.loads(_core.theorem_b_exp_family(n, p))
