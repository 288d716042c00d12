"""Conic model of the min-max interference problem.

Every constraint is stored as ``b - A x`` in a cone (zero, nonnegative
orthant or second-order cone), which is the standard form most interior
point conic solvers accept directly. Complex beamformers are split into
real and imaginary parts.

Internally the problem is rescaled so that beamformer entries are in
units of ``sqrt(max eta)`` and all amplitude-valued quantities (``z``,
slacks, inner products) are in units of ``max sqrt(rho)``. Decoding
undoes the scaling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..channel import ChannelRealization
from ..errors import ModelBuildError
from ..network import AssociationMap
from .bounds import QosBounds

__all__ = [
    "ConstraintBlock",
    "StandardForm",
    "MinMaxModel",
    "build_model",
    "reduce_phase_wlog",
    "describe_model",
]

ZERO, NONNEG, SOC = "zero", "nonneg", "soc"


@dataclass
class ConstraintBlock:
    """A family of rows ``b - A x`` constrained to one cone type.

    For ``cone == "soc"`` the rows are grouped into consecutive cones of
    the sizes in ``soc_dims``; the first row of each group is the bound.
    """

    name: str
    cone: str
    A: sp.csr_matrix
    b: np.ndarray
    soc_dims: tuple[int, ...] = ()

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]


class _BlockBuilder:
    def __init__(self, name, cone):
        self.name, self.cone = name, cone
        self.rows, self.cols, self.vals, self.b = [], [], [], []
        self.soc_dims = []

    def add(self, cols, vals, rhs=0.0):
        r = len(self.b)
        cols = np.atleast_1d(np.asarray(cols, dtype=int))
        vals = np.atleast_1d(np.asarray(vals, dtype=float))
        self.rows.append(np.full(cols.size, r))
        self.cols.append(cols)
        self.vals.append(vals)
        self.b.append(float(rhs))

    def build(self, n_vars) -> ConstraintBlock:
        if self.b:
            rows = np.concatenate(self.rows)
            cols = np.concatenate(self.cols)
            vals = np.concatenate(self.vals)
        else:
            rows = cols = np.zeros(0, dtype=int)
            vals = np.zeros(0)
        A = sp.csr_matrix((vals, (rows, cols)), shape=(len(self.b), n_vars))
        return ConstraintBlock(self.name, self.cone, A, np.array(self.b),
                               tuple(self.soc_dims))


@dataclass
class StandardForm:
    """``min c'x`` s.t. ``b - A x`` in the product cone.

    Rows are ordered zero cone, nonnegative cone, then second-order
    cones of sizes ``soc_dims``.
    """

    c: np.ndarray
    A: sp.csc_matrix
    b: np.ndarray
    n_zero: int
    n_nonneg: int
    soc_dims: list[int]
    row_families: list[tuple[str, str, int]] = field(default_factory=list)

    @property
    def shape(self):
        return self.A.shape


@dataclass
class MinMaxModel:
    """The min-max interference program for one channel realization.

    ``phase_fixed`` models have the desired inner product of each user
    pinned to the nonnegative real axis and carry no binaries.
    """

    channels: ChannelRealization
    assoc: AssociationMap
    bounds: QosBounds
    phase_fixed: bool
    n_vars: int
    slices: dict
    f_start: np.ndarray
    pairs: list
    blocks: list
    f_scale: float
    amp_scale: float
    big_m: np.ndarray

    @property
    def binaries(self) -> np.ndarray:
        s = self.slices.get("phi")
        if s is None:
            return np.zeros(0, dtype=int)
        return np.arange(s.start, s.stop)

    @property
    def n_binaries(self) -> int:
        return self.binaries.size

    def objective(self) -> np.ndarray:
        c = np.zeros(self.n_vars)
        c[self.slices["z"].start] = 1.0
        return c

    def assemble(self, phi_lower=None, phi_upper=None,
                 zero_interference: bool = False) -> StandardForm:
        """Stack all blocks into standard form.

        Binary variables get the interval ``[phi_lower, phi_upper]``;
        equal bounds fix them with equality rows. Without bounds the
        binaries are relaxed to ``[0, 1]``.

        With ``zero_interference`` the interference cones and epigraph
        rows are replaced by equalities forcing every cross term, every
        ``t`` and ``z`` to zero. Any feasible point of that program is
        optimal for the original one, and it avoids the cone-apex
        degeneracy interior-point methods hit when the optimum is ``z = 0``.
        """
        blocks = list(self.blocks)
        if zero_interference:
            blocks = [_zero_cross_block(b) if b.name == "interference-soc" else b
                      for b in blocks if b.name != "epigraph"]
            pin = _BlockBuilder("zero-epigraph", ZERO)
            pin.add(self.slices["z"].start, 1.0)
            if self.pairs:
                for col in range(self.slices["t"].start, self.slices["t"].stop):
                    pin.add(col, 1.0)
            blocks.append(pin.build(self.n_vars))
        nb = self.n_binaries
        if nb:
            lo = np.zeros(nb) if phi_lower is None else np.asarray(phi_lower, dtype=float)
            hi = np.ones(nb) if phi_upper is None else np.asarray(phi_upper, dtype=float)
            fixed_b = _BlockBuilder("binary-fixed", ZERO)
            range_b = _BlockBuilder("binary-range", NONNEG)
            for j, col in enumerate(self.binaries):
                if lo[j] == hi[j]:
                    fixed_b.add(col, 1.0, lo[j])
                else:
                    range_b.add(col, -1.0, -lo[j])
                    range_b.add(col, 1.0, hi[j])
            blocks += [fixed_b.build(self.n_vars), range_b.build(self.n_vars)]
        elif phi_lower is not None or phi_upper is not None:
            raise ValueError("model has no binary variables to bound")

        ordered = ([b for b in blocks if b.cone == ZERO]
                   + [b for b in blocks if b.cone == NONNEG]
                   + [b for b in blocks if b.cone == SOC])
        ordered = [b for b in ordered if b.n_rows]
        A = sp.vstack([b.A for b in ordered], format="csc")
        bvec = np.concatenate([b.b for b in ordered])
        soc_dims = [d for b in ordered if b.cone == SOC for d in b.soc_dims]
        return StandardForm(
            c=self.objective(), A=A, b=bvec,
            n_zero=sum(b.n_rows for b in ordered if b.cone == ZERO),
            n_nonneg=sum(b.n_rows for b in ordered if b.cone == NONNEG),
            soc_dims=soc_dims,
            row_families=[(b.name, b.cone, b.n_rows) for b in ordered],
        )

    # -- decoding -----------------------------------------------------------

    def decode_beamformers(self, x: np.ndarray) -> np.ndarray:
        m = self.channels.m_ap
        f = np.zeros((self.assoc.n_aps, self.assoc.n_users, m), dtype=complex)
        for u, aps in enumerate(self.assoc.serving_aps):
            for k, a in enumerate(aps):
                s = self.f_start[u] + 2 * m * k
                f[a, u] = x[s:s + m] + 1j * x[s + m:s + 2 * m]
        return f * self.f_scale

    def decode_amplitudes(self, x: np.ndarray) -> dict:
        """Physical values of ``z`` and the per-user slack variables."""
        out = {"z": float(x[self.slices["z"].start]) * self.amp_scale}
        v_plus = x[self.slices["v_plus"]] * self.amp_scale
        out["v_plus"] = v_plus
        if self.phase_fixed:
            out["v_minus"] = np.zeros_like(v_plus)
            out["nu"] = self.bounds.sqrt_mu - v_plus
            out["phi"] = np.ones_like(v_plus)
        else:
            out["v_minus"] = x[self.slices["v_minus"]] * self.amp_scale
            out["nu"] = x[self.slices["nu"]] * self.amp_scale
            out["phi"] = x[self.slices["phi"]].copy()
        if self.pairs:
            out["t"] = x[self.slices["t"]] * self.amp_scale
        else:
            out["t"] = np.zeros(0)
        return out


def _zero_cross_block(block: ConstraintBlock) -> ConstraintBlock:
    """Cross-term rows of the interference cones as equalities."""
    keep = np.ones(block.n_rows, dtype=bool)
    keep[0::3] = False  # drop each cone's t row
    return ConstraintBlock("zero-cross", ZERO, block.A[keep], block.b[keep])


def _check_inputs(channels: ChannelRealization, assoc: AssociationMap, bounds: QosBounds):
    if channels.n_users != assoc.n_users or channels.n_aps != assoc.n_aps:
        raise ModelBuildError(
            f"channels are {channels.n_users}x{channels.n_aps} but the association "
            f"covers {assoc.n_users} users and {assoc.n_aps} APs")
    if bounds.rho.size != assoc.n_users:
        raise ModelBuildError("bounds need one entry per user")
    if bounds.eta.size != assoc.n_aps:
        raise ModelBuildError("bounds need one power budget per AP")
    served = assoc.mask()
    for u, aps in enumerate(assoc.serving_aps):
        if not aps:
            raise ModelBuildError(f"user {u} has no serving AP")
        for a in aps:
            if u not in assoc.served_users[a]:
                raise ModelBuildError("serving and served maps are not transposes")
    if served.sum() != sum(len(us) for us in assoc.served_users):
        raise ModelBuildError("serving and served maps are not transposes")


def build_model(channels: ChannelRealization, assoc: AssociationMap, bounds: QosBounds,
                *, phase_fixed: bool = False, tighten_big_m: bool = True) -> MinMaxModel:
    """Build the epigraph form of the min-max interference problem.

    Variables, in order: beamformer real/imag parts per (user, serving AP),
    ``z``, ``v_plus``, ``v_minus``, ``nu``, ``phi`` and one interference
    magnitude ``t`` per ordered user pair. With ``phase_fixed`` the
    ``v_minus``, ``nu`` and ``phi`` blocks are dropped and ``v_plus`` is
    boxed in ``[sqrt(rho), sqrt(mu)]`` directly.

    ``tighten_big_m`` replaces ``delta`` by ``min(delta, sqrt(mu_u))`` in
    the either-or rows. The range equality already caps both slacks at
    ``sqrt(mu_u)``, so the binary-feasible set is unchanged; the literal
    ``delta`` is badly scaled against signal amplitudes of order 1e-5.
    """
    _check_inputs(channels, assoc, bounds)
    n_u, n_a, m = assoc.n_users, assoc.n_aps, channels.m_ap
    amp_scale = float(np.max(bounds.sqrt_rho))
    f_scale = float(np.sqrt(np.max(bounds.eta)))
    hs = channels.h * (f_scale / amp_scale)
    sqrt_rho = bounds.sqrt_rho / amp_scale
    sqrt_mu = bounds.sqrt_mu / amp_scale
    big_m = np.full(n_u, bounds.delta / amp_scale)
    if tighten_big_m:
        big_m = np.minimum(big_m, sqrt_mu)

    # variable layout
    sizes = [2 * m * len(aps) for aps in assoc.serving_aps]
    f_start = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)
    n_f = int(np.sum(sizes))
    pairs = [(u, i) for u in range(n_u) for i in range(n_u) if i != u]
    slices, pos = {"f": slice(0, n_f)}, n_f
    names = ["z", "v_plus"] if phase_fixed else ["z", "v_plus", "v_minus", "nu", "phi"]
    for name in names:
        width = 1 if name == "z" else n_u
        slices[name] = slice(pos, pos + width)
        pos += width
    if pairs:
        slices["t"] = slice(pos, pos + len(pairs))
        pos += len(pairs)
    n_vars = pos
    z = slices["z"].start
    vp = slices["v_plus"].start
    t0 = slices["t"].start if pairs else None

    def cross_rows(u, i):
        """Columns and (re, im) coefficients of sum_{a in A_i} h[u,a]^H f[a,i]."""
        aps = assoc.serving_aps[i]
        hv = hs[u, list(aps)]  # (k, m)
        base = f_start[i] + 2 * m * np.arange(len(aps))[:, None]
        re_cols = (base + np.arange(m)).ravel()
        im_cols = (base + m + np.arange(m)).ravel()
        hr, hi = hv.real.ravel(), hv.imag.ravel()
        cols = np.concatenate([re_cols, im_cols])
        return cols, np.concatenate([hr, hi]), np.concatenate([-hi, hr])

    # interference magnitudes: ||(Re, Im) cross term|| <= t[u, i]
    interf = _BlockBuilder("interference-soc", SOC)
    for k, (u, i) in enumerate(pairs):
        cols, c_re, c_im = cross_rows(u, i)
        interf.add(t0 + k, -1.0)
        interf.add(cols, -c_re)
        interf.add(cols, -c_im)
        interf.soc_dims.append(3)

    # epigraph: z - sum_i t[u, i] >= 0, and z >= 0
    epi = _BlockBuilder("epigraph", NONNEG)
    epi.add(z, -1.0)
    for u in range(n_u):
        ks = [t0 + k for k, (uu, _) in enumerate(pairs) if uu == u]
        epi.add(np.r_[ks, z].astype(int), np.r_[np.ones(len(ks)), -1.0])

    # desired inner product pinned to the real axis: Re = v+ - v-, Im = 0
    desired = _BlockBuilder("desired-equality", ZERO)
    for u in range(n_u):
        cols, c_re, c_im = cross_rows(u, u)
        if phase_fixed:
            desired.add(np.r_[cols, vp + u], np.r_[c_re, -1.0])
        else:
            vm = slices["v_minus"].start
            desired.add(np.r_[cols, vp + u, vm + u], np.r_[c_re, -1.0, 1.0])
        desired.add(cols, c_im)

    blocks = [interf.build(n_vars), epi.build(n_vars), desired.build(n_vars)]

    if phase_fixed:
        rng_b = _BlockBuilder("signal-range", NONNEG)
        for u in range(n_u):
            rng_b.add(vp + u, -1.0, -sqrt_rho[u])
            rng_b.add(vp + u, 1.0, sqrt_mu[u])
        blocks.append(rng_b.build(n_vars))
    else:
        vm, nu, phi = (slices[k].start for k in ("v_minus", "nu", "phi"))
        range_eq = _BlockBuilder("range-equality", ZERO)
        slack = _BlockBuilder("range-slack", NONNEG)
        sign = _BlockBuilder("slack-sign", NONNEG)
        bigm = _BlockBuilder("big-m", NONNEG)
        for u in range(n_u):
            range_eq.add([vp + u, vm + u, nu + u], [1.0, 1.0, 1.0], sqrt_mu[u])
            slack.add(nu + u, -1.0, 0.0)
            slack.add(nu + u, 1.0, sqrt_mu[u] - sqrt_rho[u])
            sign.add(vp + u, -1.0)
            sign.add(vm + u, -1.0)
            # v+ <= M phi ; v- <= M (1 - phi)
            bigm.add([vp + u, phi + u], [1.0, -big_m[u]], 0.0)
            bigm.add([vm + u, phi + u], [1.0, big_m[u]], big_m[u])
        blocks += [range_eq.build(n_vars), slack.build(n_vars), sign.build(n_vars),
                   bigm.build(n_vars)]

    # per-AP power: ||stacked f[a, .]|| <= sqrt(eta_a)
    power = _BlockBuilder("power-soc", SOC)
    for a, users in enumerate(assoc.served_users):
        if not users:
            continue
        cols = []
        for u in users:
            k = assoc.serving_aps[u].index(a)
            s = f_start[u] + 2 * m * k
            cols.extend(range(s, s + 2 * m))
        power.add([], [], np.sqrt(bounds.eta[a]) / f_scale)
        for c in cols:
            power.add(c, -1.0)
        power.soc_dims.append(1 + len(cols))
    blocks.append(power.build(n_vars))

    return MinMaxModel(
        channels=channels, assoc=assoc, bounds=bounds, phase_fixed=phase_fixed,
        n_vars=n_vars, slices=slices, f_start=f_start, pairs=pairs, blocks=blocks,
        f_scale=f_scale, amp_scale=amp_scale, big_m=big_m * amp_scale,
    )


def reduce_phase_wlog(model: MinMaxModel) -> MinMaxModel:
    """Drop the binaries by fixing each desired inner product real and >= 0.

    Every constraint and the objective see a user's beamformers only
    through moduli and norms, which a common phase rotation of that user's
    cluster leaves unchanged; so ``phi = 1`` and ``v_minus = 0`` lose no
    optimality.
    """
    if model.phase_fixed:
        return model
    return build_model(model.channels, model.assoc, model.bounds, phase_fixed=True)


def describe_model(model: MinMaxModel) -> str:
    """Plain-text dump of the standard-form program's dimensions and cones."""
    sf = model.assemble()
    lines = [
        f"variables            {model.n_vars}",
        f"  beamformer (real)  {model.slices['f'].stop}",
        f"  binaries           {model.n_binaries}",
        f"  interference t     {len(model.pairs)}",
        f"rows                 {sf.A.shape[0]}",
        f"nonzeros             {sf.A.nnz}",
        f"zero cone rows       {sf.n_zero}",
        f"nonneg cone rows     {sf.n_nonneg}",
        f"second-order cones   {len(sf.soc_dims)}"
        + (f" (sizes {min(sf.soc_dims)}..{max(sf.soc_dims)})" if sf.soc_dims else ""),
        f"phase fixed          {model.phase_fixed}",
        f"scales               f={model.f_scale:.6g} amp={model.amp_scale:.6g}",
        "families:",
    ]
    for name, cone, n in sf.row_families:
        lines.append(f"  {name:<20s} {cone:<7s} {n}")
    return "\n".join(lines) + "\n"
