"""Independent constraint audit of a beamforming solution.

Everything is recomputed from the raw beamformers and channel vectors;
nothing is read back from solver internals except the reported slack
values, which are themselves checked against the recomputed quantities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..beamformers import BeamformerSet
from ..metrics import inner_products
from .bounds import QosBounds
from .solver import BeamformingSolution

__all__ = ["FeasibilityReport", "check_feasibility", "epigraph_gap"]


@dataclass
class FeasibilityReport:
    """Worst relative violation per constraint family (``<= 0`` is satisfied)."""

    tol: float
    violations: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.violations.values())

    @property
    def worst(self) -> tuple[str, float]:
        if not self.violations:
            return ("", 0.0)
        name = max(self.violations, key=self.violations.get)
        return name, self.violations[name]

    def failed_families(self) -> list[str]:
        return [k for k, v in self.violations.items() if v > self.tol]

    def __str__(self):
        lines = [f"{k:<18s} {v: .3e} {'ok' if v <= self.tol else 'VIOLATED'}"
                 for k, v in self.violations.items()]
        return "\n".join(lines)


def _worst(x) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(np.max(x)) if x.size else 0.0


def epigraph_gap(solution: BeamformingSolution, channels, bounds: QosBounds) -> float:
    """Relative gap between ``z`` and the recomputed worst interference sum.

    Normalized by ``max(z, max sqrt(rho))`` so that a zero-forcing optimum
    (``z`` near 0) is judged on the signal amplitude scale.
    """
    G = inner_products(channels, solution.beamformers)
    np.fill_diagonal(G, 0.0)
    worst = float(np.max(np.sum(np.abs(G), axis=1)))
    ref = max(abs(solution.z), float(np.max(bounds.sqrt_rho)))
    return abs(solution.z - worst) / ref


def check_feasibility(solution, channels, assoc, bounds: QosBounds,
                      tol: float = 1e-6) -> FeasibilityReport:
    """Audit every constraint family of the min-max program.

    ``solution`` may be a :class:`BeamformingSolution` or a bare
    :class:`BeamformerSet`; the latter (closed-form baselines) is only
    checked against the per-AP power budget.

    Families and their normalizers:

    ``power``             per-AP ``sum ||f||^2 - eta``, over ``eta``
    ``unserved``          beamformer energy on non-serving pairs, over ``eta``
    ``epigraph``          ``sum_i |cross| - z``, over ``max(z, max sqrt(rho))``
    ``signal-bounds``     ``sqrt(rho) <= |desired| <= sqrt(mu)``, over ``sqrt(rho)`` / ``sqrt(mu)``
    ``desired-equality``  ``|desired - (v+ - v-)|``, over ``sqrt(mu)``
    ``range-equality``    ``|v+ + v- + nu - sqrt(mu)|``, over ``sqrt(mu)``
    ``range-slack``       ``0 <= nu <= sqrt(mu) - sqrt(rho)``, over ``sqrt(mu)``
    ``slack-sign``        ``v+, v- >= 0``, over ``sqrt(mu)``
    ``big-m``             ``v+ <= delta phi``, ``v- <= delta (1 - phi)``, over ``delta``
    ``binary``            distance of ``phi`` from {0, 1}
    """
    report = FeasibilityReport(tol)
    if isinstance(solution, BeamformerSet):
        f_set, sol = solution, None
    else:
        f_set, sol = solution.beamformers, solution
    eta = bounds.eta
    report.violations["power"] = _worst((f_set.ap_powers() - eta) / eta)
    off = ~assoc.mask()
    leak = np.sum(np.abs(f_set.f) ** 2, axis=-1) * off
    report.violations["unserved"] = _worst(np.sum(leak, axis=1) / eta)
    if sol is None:
        return report

    sr, sm = bounds.sqrt_rho, bounds.sqrt_mu
    G = inner_products(channels, f_set)
    desired = np.diag(G).copy()
    np.fill_diagonal(G, 0.0)
    interference = np.sum(np.abs(G), axis=1)
    ref = max(abs(sol.z), float(np.max(sr)))
    report.violations["epigraph"] = _worst((interference - sol.z) / ref)
    amp = np.abs(desired)
    report.violations["signal-bounds"] = max(_worst((sr - amp) / sr), _worst((amp - sm) / sm))

    vp, vm, nu, phi = sol.v_plus, sol.v_minus, sol.nu, sol.phi
    report.violations["desired-equality"] = _worst(np.abs(desired - (vp - vm)) / sm)
    report.violations["range-equality"] = _worst(np.abs(vp + vm + nu - sm) / sm)
    report.violations["range-slack"] = max(_worst(-nu / sm), _worst((nu - (sm - sr)) / sm))
    report.violations["slack-sign"] = max(_worst(-vp / sm), _worst(-vm / sm))
    d = bounds.delta
    report.violations["big-m"] = max(_worst((vp - d * phi) / d), _worst((vm - d * (1 - phi)) / d))
    report.violations["binary"] = _worst(np.minimum(np.abs(phi), np.abs(1 - phi)))
    return report
