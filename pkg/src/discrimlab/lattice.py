"""Least upper and greatest lower bounds in the trace ordering.

For two Hermitian operators both bounds have closed forms built from the
absolute value of the difference. For more operators the LUB is the unique
minimal-trace upper bound, computed by the barrier solver in ``sdp``.
"""

from dataclasses import dataclass

import numpy as np

from . import matops
from .errors import DegenerateInputError, PreconditionError
from .sdp import solve_lub


@dataclass(frozen=True)
class LubResult:
    """Minimal-trace upper bound together with its certificate.

    ``feasibility_slack`` is the most negative eigenvalue among ``Y - A_k``.
    """

    operator: np.ndarray
    trace_value: float
    dual_gap: float
    feasibility_slack: float
    effects: np.ndarray
    newton_steps: int = 0


def lub2(a, b):
    """``LUB(A, B) = (A + B + |A - B|) / 2``."""
    return 0.5 * (a + b + matops.abs_op(a - b))


def glb2(a, b):
    """``GLB(A, B) = (A + B - |A - B|) / 2 = -LUB(-A, -B)``."""
    return 0.5 * (a + b - matops.abs_op(a - b))


def lub2_trace(a, b):
    return 0.5 * (matops.real_trace(a + b) + matops.trace_norm(a - b))


def glb2_trace(a, b):
    """Trace of the binary GLB, i.e. the optimal binary error for PSD inputs."""
    return 0.5 * (matops.real_trace(a + b) - matops.trace_norm(a - b))


def _common_dim(ops):
    if len(ops) == 0:
        raise PreconditionError("need at least one operator")
    d = ops[0].shape[0]
    if any(o.shape != (d, d) for o in ops):
        raise PreconditionError("operators must share a common dimension")
    return d


def lub_sdp(ops, tol=None):
    """Minimal-trace upper bound of Hermitian operators via the barrier SDP."""
    ops = [np.asarray(o, dtype=complex) for o in ops]
    _common_dim(ops)
    sol = solve_lub(ops, tol=tol)
    return LubResult(sol.y, sol.dual, sol.gap, sol.feasibility_slack, sol.effects,
                     sol.newton_steps)


def glb_sdp(ops, tol=None):
    """Maximal-trace lower bound, ``GLB({A_k}) = -LUB({-A_k})``."""
    res = lub_sdp([-np.asarray(o, dtype=complex) for o in ops], tol=tol)
    return LubResult(-res.operator, -res.trace_value, res.dual_gap,
                     res.feasibility_slack, res.effects, res.newton_steps)


def dmax_radius(states):
    """Max-relative-entropy radius ``log Tr LUB`` and its center ``LUB / Tr LUB``."""
    ops = [np.asarray(o, dtype=complex) for o in states]
    _common_dim(ops)
    for i, o in enumerate(ops):
        matops.check_psd(o, f"input {i}")
    if all(matops.trace_norm(o) == 0.0 for o in ops):
        raise DegenerateInputError("all inputs are zero; the radius is -infinity")
    if len(ops) == 1:
        y = ops[0]
    elif len(ops) == 2:
        y = lub2(ops[0], ops[1])
    else:
        y = lub_sdp(ops).operator
    t = matops.real_trace(y)
    return float(np.log(t)), y / t
