"""Generalized stochastic dominance for mixed-scale comparisons.

Documents (preference systems, credal sets, acts, metric declarations) are
plain dicts in the same layout as the command-line JSON files.
"""

import json
import os

from . import _core
from ._core import GsdError, __version__

__all__ = [
    "GsdError",
    "check_consistency",
    "compare",
    "extreme_points",
    "front",
    "membership_test",
    "permutation_test",
    "robust_test",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def _csv(evals):
    if isinstance(evals, (str, os.PathLike)) and os.path.exists(evals):
        with open(evals, encoding="utf-8") as f:
            return f.read()
    if isinstance(evals, str):
        return evals
    lines = ["subject,instance,metric,value"]
    lines += [",".join(str(v) for v in row) for row in evals]
    return "\n".join(lines) + "\n"


def check_consistency(system, delta=0.0):
    return _core.check_consistency(_text(system), delta)


def extreme_points(credal):
    return _core.extreme_points(_text(credal))


def compare(system, credal, acts, delta=0.0, workers=1):
    return _core.compare(_text(system), _text(credal), _text(acts), delta, workers)


def permutation_test(x, y, metrics, delta=0.0, replicates=199, seed=0, design="two-sample", workers=1):
    return _core.permutation_test(x, y, _text(metrics), delta, replicates, seed, design, workers)


def robust_test(x, y, metrics, delta=0.0, zeta_grid=(0.0,), alpha=0.05, replicates=199, seed=0,
                design="two-sample", workers=1):
    return _core.robust_test(x, y, _text(metrics), delta, list(zeta_grid), alpha, replicates, seed, design, workers)


def front(evals, metrics, delta=0.0, epsilon=0.0, workers=1):
    """evals: CSV path, CSV text, or rows (subject, instance, metric, value)."""
    return _core.front(_csv(evals), _text(metrics), delta, epsilon, workers)


def membership_test(evals, metrics, candidate, delta=0.0, replicates=199, seed=0, alpha=0.05, opponents=None,
                    workers=1):
    return _core.membership_test(_csv(evals), _text(metrics), candidate, delta, replicates, seed, alpha,
                                 opponents, workers)
