"""Log-det barrier interior-point solver for ``min Tr Y  s.t.  Y >= A_k``.

The barrier problem at parameter ``mu`` is

    minimize  Tr Y - mu * sum_k log det (Y - A_k)

whose stationarity condition ``sum_k mu (Y - A_k)^{-1} = I`` says that the
barrier multipliers ``E_k = mu (Y - A_k)^{-1}`` form a complete POVM. Every
centered iterate therefore yields a primal-feasible measurement (after an
exact renormalization ``S^{-1/2} E_k S^{-1/2}``) and a strictly dual-feasible
``Y``, i.e. a certified two-sided bound on the optimal value.

Newton steps use the full ``d^2 x d^2`` Hessian ``mu sum_k Z_k^{-1} (x) Z_k^{-T}``,
so this is meant for the small dimensions used throughout the package.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

MAX_NEWTON = 500
GAP_REL = 1e-7
# the solver keeps iterating past the contract tolerance when it can
_TARGET_REL = 1e-11
_THETA = 0.01
_CENTERED = 0.8
# once a certificate meets the contract, stop after this many steps without a better one
_STALL = 25


@dataclass(frozen=True)
class LubSolution:
    y: np.ndarray
    effects: np.ndarray
    primal: float
    dual: float
    gap: float
    feasibility_slack: float
    newton_steps: int


def gap_tolerance(ops):
    """Contract gap tolerance ``1e-7 * max(1, sum_k Tr A_k)``."""
    total = float(sum(np.abs(np.trace(a).real) for a in ops))
    return GAP_REL * max(1.0, total)


def _sym(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2).conj())


def _chol(z):
    try:
        return np.linalg.cholesky(z)
    except np.linalg.LinAlgError:
        return None


def _logdet_sum(chol):
    return 2.0 * float(np.sum(np.log(np.abs(np.diagonal(chol, axis1=-2, axis2=-1)))))


def _certificate(a, y, zinv, dy, mu):
    """Primal POVM, primal value and certified gap from a Newton direction.

    ``E_k = mu (Z_k^{-1} - Z_k^{-1} dY Z_k^{-1})`` sums to the identity by the
    Newton equation and is PSD whenever the Newton decrement is below one.
    Rounding is removed by clipping and an exact renormalization.
    """
    e = mu * (zinv - zinv @ dy[None] @ zinv)
    w, v = np.linalg.eigh(_sym(e))
    w = np.maximum(w, 0.0)
    e = (v * w[:, None, :]) @ np.swapaxes(v, -1, -2).conj()
    s = _sym(e.sum(axis=0))
    ws, vs = np.linalg.eigh(s)
    if ws[0] <= 0.5:
        return None
    s_isqrt = (vs / np.sqrt(ws)) @ vs.conj().T
    e = _sym(s_isqrt @ e @ s_isqrt)
    z = y[None, :, :] - a
    # sum_k Tr Z_k E_k is the duality gap once sum_k E_k = I; every term is >= 0
    gap = max(float(np.einsum("kij,kji->", z, e).real), 0.0)
    dual = float(np.trace(y).real)
    primal = float(np.einsum("kij,kji->", a, e).real)
    return e, primal, dual, gap


def solve_lub(ops, tol=None, max_newton=MAX_NEWTON):
    """Solve ``min Tr Y s.t. Y >= A_k`` with a primal POVM certificate.

    Returns a ``LubSolution``; raises ``ConvergenceError`` (with the best
    certificate found) if the gap does not reach ``tol`` within
    ``max_newton`` Newton steps.
    """
    a = np.asarray(ops, dtype=complex)
    r, d, _ = a.shape
    contract = gap_tolerance(a) if tol is None else float(tol)
    scale = max(1.0, float(np.sum(np.abs(np.trace(a, axis1=1, axis2=2).real))))
    target = min(contract, _TARGET_REL * scale)

    if r == 1:
        e = np.eye(d, dtype=complex)[None]
        return LubSolution(a[0].copy(), e, float(np.trace(a[0]).real),
                           float(np.trace(a[0]).real), 0.0, 0.0, 0)

    eye = np.eye(d, dtype=complex)
    lam = np.array([np.linalg.eigvalsh(x)[[0, -1]] for x in a])
    spread = float(np.max(np.abs(lam)))
    if spread == 0.0:
        e = np.zeros_like(a)
        e[0] = eye
        return LubSolution(np.zeros((d, d), dtype=complex), e, 0.0, 0.0, 0.0, 0.0, 0)
    y = (float(np.max(lam[:, 1])) + spread) * eye
    z = y[None] - a
    zinv = np.linalg.inv(z)
    mu = d / float(np.trace(zinv.sum(axis=0)).real)

    best = None
    last = None
    steps = 0
    best_step = 0
    fval = None
    while steps < max_newton:
        if best is not None and best[4] <= contract and steps - best_step >= _STALL:
            # rounding keeps the tiny-mu iterates from re-centering
            break
        grad = eye - mu * zinv.sum(axis=0)
        hess = mu * np.einsum("kij,klm->iljm", zinv, zinv.conj()).reshape(d * d, d * d)
        try:
            dy = np.linalg.solve(hess, -grad.reshape(-1)).reshape(d, d)
        except np.linalg.LinAlgError:
            break
        dy = _sym(dy)
        lam2 = -float(np.vdot(grad, dy).real)
        dec = np.sqrt(max(lam2, 0.0) / mu)

        if dec < 0.9:
            # predicted gap of the Newton-corrected multipliers
            est = mu * (r * d - float(np.einsum("kij,ji->", zinv, dy).real))
            if est <= target or steps >= max_newton - 1:
                cert = _certificate(a, y, zinv, dy, mu)
                if cert is not None and (best is None or cert[3] < best[4]):
                    best = (y.copy(), *cert)
                    best_step = steps
                if best is not None and best[4] <= target:
                    break
            last = (y, zinv, dy, mu)
        if dec < _CENTERED:
            mu *= _THETA
            fval = None
            steps += 1
            continue

        # damped Newton step on the barrier, backtracking to stay feasible
        if fval is None:
            fval = float(np.trace(y).real) / mu - _logdet_sum(_chol(z))
        t = 1.0
        accepted = False
        for _ in range(60):
            y_new = y + t * dy
            z_new = y_new[None] - a
            chol = _chol(z_new)
            if chol is not None:
                f_new = float(np.trace(y_new).real) / mu - _logdet_sum(chol)
                if f_new <= fval - 0.25 * t * dec * dec or t * (1.0 + dec) <= 1.0:
                    accepted = True
                    break
            t *= 0.5
        steps += 1
        if not accepted:
            break
        y, z, fval = y_new, z_new, f_new
        zinv = np.linalg.inv(z)

    if best is None and last is not None:
        cert = _certificate(a, last[0], last[1], last[2], last[3])
        if cert is not None:
            best = (last[0].copy(), *cert)
    if best is None:
        raise ConvergenceError("LUB barrier solver produced no certificate", steps=steps)
    y_best, e, primal, dual, gap = best
    slack = min(float(np.linalg.eigvalsh(y_best - x)[0]) for x in a)
    if gap > contract:
        raise ConvergenceError(
            f"LUB solver stopped with gap {gap:.3g} > tolerance {contract:.3g}",
            y=y_best, effects=e, primal=primal, dual=dual, gap=gap, steps=steps,
        )
    return LubSolution(y_best, e, primal, dual, gap, slack, steps)
