"""Interior-point solve of the assembled second-order cone program.

Clarabel is the conic engine; this module owns the contract around it:
status mapping, decoding back to physical units and never reporting a
non-converged run as optimal.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import clarabel
import numpy as np
import scipy.sparse as sp

from ..beamformers import BeamformerSet
from .model import MinMaxModel, StandardForm

__all__ = [
    "OPTIMAL", "INFEASIBLE", "NUMERICAL_FAILURE", "ITERATION_LIMIT",
    "ConicResult", "BeamformingSolution", "solve_conic", "solve_model", "solve_socp",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
NUMERICAL_FAILURE = "numerical-failure"
ITERATION_LIMIT = "iteration-limit"

# internal solver targets; acceptance checks run at 1e-6
TOL_FEAS = 1e-9
TOL_GAP = 1e-9
MAX_ITER = 200

_STATUS = {
    "Solved": OPTIMAL,
    "PrimalInfeasible": INFEASIBLE,
    "AlmostPrimalInfeasible": INFEASIBLE,
    "DualInfeasible": NUMERICAL_FAILURE,
    "AlmostDualInfeasible": NUMERICAL_FAILURE,
    "MaxIterations": ITERATION_LIMIT,
    "MaxTime": ITERATION_LIMIT,
}


@dataclass
class ConicResult:
    status: str
    x: np.ndarray | None
    objective: float
    iterations: int
    solve_time: float
    message: str = ""


@dataclass
class BeamformingSolution:
    """Output of the min-max optimizer in physical units."""

    beamformers: BeamformerSet | None
    z: float
    v_plus: np.ndarray | None
    v_minus: np.ndarray | None
    nu: np.ndarray | None
    phi: np.ndarray | None
    status: str
    iterations: int = 0
    solve_time: float = 0.0
    message: str = ""
    nodes: int = 1
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _settings(max_iter: int):
    s = clarabel.DefaultSettings()
    s.verbose = False
    s.max_iter = max_iter
    s.tol_feas = TOL_FEAS
    s.tol_gap_abs = TOL_GAP
    s.tol_gap_rel = TOL_GAP
    s.max_threads = 1
    return s


def _cones(sf: StandardForm):
    cones = []
    if sf.n_zero:
        cones.append(clarabel.ZeroConeT(sf.n_zero))
    if sf.n_nonneg:
        cones.append(clarabel.NonnegativeConeT(sf.n_nonneg))
    cones.extend(clarabel.SecondOrderConeT(d) for d in sf.soc_dims)
    return cones


def _residual_ok(sf: StandardForm, x: np.ndarray, tol: float) -> bool:
    """Primal feasibility of ``x`` in the product cone, relative to ``1 + |b|``."""
    s = sf.b - sf.A @ x
    scale = 1.0 + np.max(np.abs(sf.b))
    nz, nn = sf.n_zero, sf.n_nonneg
    worst = np.max(np.abs(s[:nz]), initial=0.0)
    worst = max(worst, -np.min(s[nz:nz + nn], initial=0.0))
    pos = nz + nn
    for d in sf.soc_dims:
        blk = s[pos:pos + d]
        worst = max(worst, np.linalg.norm(blk[1:]) - blk[0])
        pos += d
    return worst <= tol * scale


def solve_conic(sf: StandardForm, max_iter: int = MAX_ITER) -> ConicResult:
    """Run the interior-point engine on a standard-form program."""
    n = sf.A.shape[1]
    P = sp.csc_matrix((n, n))
    t0 = time.perf_counter()
    solver = clarabel.DefaultSolver(P, sf.c, sf.A, sf.b, _cones(sf), _settings(max_iter))
    sol = solver.solve()
    elapsed = time.perf_counter() - t0
    raw = str(sol.status)
    status = _STATUS.get(raw, NUMERICAL_FAILURE)
    x = np.asarray(sol.x, dtype=float)
    if raw == "AlmostSolved":
        # reduced accuracy: accept only if the point is primal feasible
        status = OPTIMAL if _residual_ok(sf, x, 1e-7) else NUMERICAL_FAILURE
    if status != OPTIMAL:
        return ConicResult(status, None, np.nan, sol.iterations, elapsed, raw)
    return ConicResult(status, x, float(sf.c @ x), sol.iterations, elapsed, raw)


def solve_model(model: MinMaxModel, phi_lower=None, phi_upper=None,
                max_iter: int = MAX_ITER, zero_interference_first: bool = True) -> ConicResult:
    """Solve ``model`` with binaries boxed in ``[phi_lower, phi_upper]``.

    Tries the zero-interference program first (see
    :meth:`MinMaxModel.assemble`) and falls back to the full program when
    it is infeasible or fails.
    """
    if zero_interference_first and model.pairs:
        res = solve_conic(model.assemble(phi_lower, phi_upper, zero_interference=True),
                          max_iter)
        if res.status == OPTIMAL:
            return res
    return solve_conic(model.assemble(phi_lower, phi_upper), max_iter)


def _decode(model: MinMaxModel, res: ConicResult, scheme: str = "minmax") -> BeamformingSolution:
    if res.x is None:
        return BeamformingSolution(None, np.nan, None, None, None, None, res.status,
                                   res.iterations, res.solve_time, res.message)
    amps = model.decode_amplitudes(res.x)
    f = BeamformerSet(model.decode_beamformers(res.x), scheme)
    return BeamformingSolution(
        beamformers=f, z=amps["z"], v_plus=amps["v_plus"], v_minus=amps["v_minus"],
        nu=amps["nu"], phi=amps["phi"], status=res.status, iterations=res.iterations,
        solve_time=res.solve_time, message=res.message, extras={"t": amps["t"]},
    )


def solve_socp(model: MinMaxModel, phi=None, max_iter: int = MAX_ITER,
               zero_interference_first: bool = True) -> BeamformingSolution:
    """Solve a binary-free model, or a full model with every ``phi`` fixed.

    With ``zero_interference_first`` a feasibility program with every
    cross term pinned to zero is tried first; if it is feasible its point
    is optimal (``z = 0`` is the least possible value). Otherwise the full
    program is solved.

    Raises ``ValueError`` if the model still has free binaries; use
    :func:`reduce_phase_wlog` or :func:`branch_and_bound` for those.
    """
    if model.n_binaries:
        if phi is None:
            raise ValueError("model has binaries; fix phi or reduce the model first")
        phi = np.asarray(phi, dtype=float)
        if phi.shape != (model.n_binaries,) or not np.all((phi == 0) | (phi == 1)):
            raise ValueError("phi must be a 0/1 vector with one entry per user")
        lo = hi = phi
    else:
        if phi is not None:
            raise ValueError("model has no binaries to fix")
        lo = hi = None
    res = solve_model(model, lo, hi, max_iter, zero_interference_first)
    sol = _decode(model, res)
    if sol.ok and model.n_binaries:
        sol.phi = phi.copy()
    return sol
