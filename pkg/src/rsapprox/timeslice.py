"""Arbitrary-support coherent states via the time-slice property.

A test function ``f`` is traded for ``f0 = (box + m^2)(chi_t E f)`` which has
the same Pauli-Jordan solution and lives in a thin time slab.  The slab
function is then split with a spacetime bump into a part near the target
region and a part spacelike to it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import rserror
from .geometry import (
    Box,
    Frame,
    GeometryError,
    Point2,
    Region,
    W_L,
    causal_complement,
    causal_completion,
    relate,
    select_frame,
)
from .qft import DEFAULT_GRID, w2
from .testfn import (
    AnalyticGaussian,
    Cutoff,
    CutoffProduct,
    FieldModel,
    GridBump,
    Lattice,
    LatticeError,
    NullBoxBump,
    RapidityGrid,
    Sum,
    TemporalStep,
    TestFunction,
    Zero,
    on_shell_profile,
)


class TimesliceError(RuntimeError):
    def __init__(self, stage: str, msg: str):
        self.stage = stage
        super().__init__(f"[{stage}] {msg}")


class SeamError(ValueError):
    pass


# ---------------------------------------------------------------------------
# lattice helpers


def as_grid(f: TestFunction, dt: float = 0.02, dx: float = 0.02) -> GridBump:
    """Single-lattice representation; Gaussians are sampled on their effective support."""
    if isinstance(f, GridBump):
        return f
    if isinstance(f, CutoffProduct):
        return as_grid(f.materialize(), dt, dx)
    if isinstance(f, AnalyticGaussian):
        bb = f.support_region().bounding_box()
        lat = Lattice.covering(
            0.5 * (bb.u_lo + bb.v_lo), 0.5 * (bb.u_hi + bb.v_hi), 0.5 * (bb.v_lo - bb.u_hi), 0.5 * (bb.v_hi - bb.u_lo), dt, dx
        )
        return GridBump.sample(f, lat)
    if isinstance(f, Sum):
        parts = [as_grid(c, dt, dx) for c in f.components if not c.is_zero]
        if not parts:
            raise LatticeError("zero function has no lattice")
        return merge_grids(parts)
    raise LatticeError(f"cannot place {type(f).__name__} on a lattice")


def merge_grids(parts: list[GridBump]) -> GridBump:
    """Sum of grid functions sharing spacings and node alignment."""
    L0 = parts[0].lattice
    for p in parts[1:]:
        L = p.lattice
        if L.dt != L0.dt or L.dx != L0.dx:
            raise LatticeError("grid components must share spacings")
        for off, d in ((L.t0 - L0.t0, L0.dt), (L.x0 - L0.x0, L0.dx)):
            if abs(off / d - round(off / d)) > 1e-9:
                raise LatticeError("grid components are not node-aligned")
    i0 = min(round((p.lattice.t0 - L0.t0) / L0.dt) for p in parts)
    j0 = min(round((p.lattice.x0 - L0.x0) / L0.dx) for p in parts)
    i1 = max(round((p.lattice.t0 - L0.t0) / L0.dt) + p.lattice.nt for p in parts)
    j1 = max(round((p.lattice.x0 - L0.x0) / L0.dx) + p.lattice.nx for p in parts)
    lat = Lattice(L0.t0 + i0 * L0.dt, L0.dt, i1 - i0, L0.x0 + j0 * L0.dx, L0.dx, j1 - j0)
    s = np.zeros(lat.shape)
    for p in parts:
        a = round((p.lattice.t0 - L0.t0) / L0.dt) - i0
        b = round((p.lattice.x0 - L0.x0) / L0.dx) - j0
        s[a : a + p.lattice.nt, b : b + p.lattice.nx] += p.samples
    return GridBump(lat, s)


@dataclass(frozen=True)
class SpectralLattice:
    """Periodic spatial lattice ``x_j = x_left + j dx``, ``j < n``."""

    x_left: float
    dx: float
    n: int

    @property
    def x(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.n)

    @property
    def x_right(self) -> float:
        return self.x_left + self.n * self.dx

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @classmethod
    def around(cls, lattice: Lattice, half_width: float, center: float = 0.0) -> "SpectralLattice":
        """Lattice node-aligned with ``lattice`` spanning ``center +- half_width``."""
        dx = lattice.dx
        shift = math.ceil((lattice.x0 - (center - half_width)) / dx - 1e-9)
        n = int(math.ceil(2 * half_width / dx))
        n += n % 2
        return cls(lattice.x0 - shift * dx, dx, n)


@dataclass(frozen=True, eq=False)
class SolutionField:
    """``u = E f`` (retarded minus advanced) stored per spatial mode.

    ``u_k(t) = (sin(w t) C_k - cos(w t) S_k) / w`` with ``C_k, S_k`` the source
    integrals of ``cos(w s) f_k(s)`` and ``sin(w s) f_k(s)``.
    """

    lattice: SpectralLattice
    omega: np.ndarray
    C: np.ndarray
    S: np.ndarray
    source_box: Box | None  # null bounding box of supp f
    source_t: tuple[float, float]

    def state(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Cauchy data ``(u, du/dt)`` on the lattice at time ``t``."""
        om = self.omega
        c, s = np.cos(om * t), np.sin(om * t)
        uk = (s * self.C - c * self.S) / om
        vk = c * self.C + s * self.S
        ph = np.exp(1j * self.lattice.k * self.lattice.x_left) / self.lattice.dx
        u = np.fft.ifft(uk * ph).real
        ud = np.fft.ifft(vk * ph).real
        return u, ud

    def mode_energy(self, t: float) -> np.ndarray:
        om = self.omega
        c, s = np.cos(om * t), np.sin(om * t)
        uk = (s * self.C - c * self.S) / om
        vk = c * self.C + s * self.S
        return np.abs(vk) ** 2 + om**2 * np.abs(uk) ** 2


def propagate(
    f: TestFunction,
    lattice: SpectralLattice,
    model: FieldModel = FieldModel(),
    window: tuple[float, float] | None = None,
    seam_margin: float = 0.5,
) -> SolutionField:
    """Pauli-Jordan solution by exact per-mode Duhamel integration.

    Raises ``SeamError`` if the light cone of ``supp f`` reaches the periodic
    seam (within ``seam_margin``) for any time in ``window``.
    """
    k = lattice.k
    om = np.sqrt(k * k + model.mass**2)
    if f.is_zero:
        z = np.zeros(lattice.n, dtype=complex)
        return SolutionField(lattice, om, z, z.copy(), None, (0.0, 0.0))
    g = as_grid(f, dx=lattice.dx)
    L = g.lattice
    if abs(L.dx - lattice.dx) > 1e-15 * L.dx:
        raise LatticeError("source and solver spacings differ")
    off = (L.x0 - lattice.x_left) / lattice.dx
    j0 = int(round(off))
    if abs(off - j0) > 1e-9:
        raise LatticeError("source lattice not node-aligned with the solver lattice")
    nz = g.samples != 0
    rows = np.flatnonzero(nz.any(axis=1))
    cols = np.flatnonzero(nz.any(axis=0))
    t_src = (L.t0 + (rows[0] - 0.5) * L.dt, L.t0 + (rows[-1] + 0.5) * L.dt)
    x_src = (L.x0 + (cols[0] - 0.5) * L.dx, L.x0 + (cols[-1] + 0.5) * L.dx)
    win = window or t_src
    spread = max(0.0, t_src[0] - win[0], win[1] - t_src[1])
    lo = x_src[0] - spread - seam_margin
    hi = x_src[1] + spread + seam_margin
    if lo < lattice.x_left or hi > lattice.x_right - lattice.dx:
        need = max(abs(lo - 0.5 * (lattice.x_left + lattice.x_right)), abs(hi - 0.5 * (lattice.x_left + lattice.x_right)))
        raise SeamError(
            f"light cone of the source spans x in [{lo:.3f}, {hi:.3f}] (with margin) over t in "
            f"[{win[0]:.3f}, {win[1]:.3f}]; solver covers [{lattice.x_left:.3f}, {lattice.x_right:.3f}]; "
            f"increase half_width to at least {need:.3f}"
        )
    sub = g.samples[rows[0] : rows[-1] + 1]
    full = np.zeros((sub.shape[0], lattice.n))
    full[:, j0 + cols[0] : j0 + cols[-1] + 1] = sub[:, cols[0] : cols[-1] + 1]
    fk = np.fft.fft(full, axis=1) * lattice.dx * np.exp(-1j * k * lattice.x_left)
    ts = L.t0 + L.dt * np.arange(rows[0], rows[-1] + 1)
    ph = np.outer(ts, om)
    C = L.dt * np.sum(np.cos(ph) * fk, axis=0)
    S = L.dt * np.sum(np.sin(ph) * fk, axis=0)
    box = Box(t_src[0] - x_src[1], t_src[1] - x_src[0], t_src[0] + x_src[0], t_src[1] + x_src[1])
    return SolutionField(lattice, om, C, S, box, t_src)


@dataclass(frozen=True)
class SlabSpec:
    """Temporal transition interval of the slab cutoff."""

    t1: float
    t2: float

    def __post_init__(self):
        if not self.t1 < self.t2:
            raise ValueError("slab needs t1 < t2")

    @property
    def step(self) -> TemporalStep:
        return TemporalStep(self.t1, self.t2)


def slab_box(slab: SlabSpec, x_lo: float, x_hi: float) -> Region:
    """Null bounding box of the rectangle ``[t1, t2] x [x_lo, x_hi]``."""
    return Region([(slab.t1 - x_hi, slab.t2 - x_lo, slab.t1 + x_lo, slab.t2 + x_hi)])


def slab_reduce(
    f: TestFunction,
    slab: SlabSpec,
    lattice: SpectralLattice,
    model: FieldModel = FieldModel(),
    *,
    seam_margin: float = 0.5,
) -> GridBump:
    """``f0 = chi'' u + 2 chi' du/dt`` on the slab rows, ``u = E f``.

    The slab must lie strictly after or strictly before ``supp f``; values are
    restricted to the exact causal future (or past) of ``supp f``.
    """
    g = as_grid(f, dx=lattice.dx)
    L = g.lattice
    nz = g.samples != 0
    if not nz.any():
        return _zero_grid(L)
    rows = np.flatnonzero(nz.any(axis=1))
    t_lo = L.t0 + (rows[0] - 0.5) * L.dt
    t_hi = L.t0 + (rows[-1] + 0.5) * L.dt
    if slab.t2 - slab.t1 <= 4 * L.dt:
        raise ValueError("slab transition must span more than four time steps")
    if slab.t1 >= t_hi:
        future = True
    elif slab.t2 <= t_lo:
        future = False
    else:
        raise ValueError(f"slab [{slab.t1}, {slab.t2}] overlaps the source times [{t_lo:.3f}, {t_hi:.3f}]")
    sol = propagate(g, lattice, model, window=(min(slab.t1, t_lo), max(slab.t2, t_hi)), seam_margin=seam_margin)
    i_lo = math.floor((slab.t1 - L.t0) / L.dt + 1e-9) - 1
    i_hi = math.ceil((slab.t2 - L.t0) / L.dt - 1e-9) + 1
    ts = L.t0 + L.dt * np.arange(i_lo, i_hi + 1)
    chi, d1, d2 = slab.step.derivatives(ts)
    out = np.zeros((ts.size, lattice.n))
    for i, t in enumerate(ts):
        if d1[i] == 0.0 and d2[i] == 0.0:
            continue
        u, ud = sol.state(t)
        out[i] = d2[i] * u + 2 * d1[i] * ud
    # exact causal shadow of the source cells
    b = sol.source_box
    T = ts[:, None]
    X = lattice.x[None, :]
    if future:
        mask = (T - X > b.u_lo) & (T + X > b.v_lo)
    else:
        mask = (T - X < b.u_hi) & (T + X < b.v_hi)
    out[~mask] = 0.0
    cols = np.flatnonzero(out.any(axis=0))
    if cols.size == 0:
        return _zero_grid(L)
    c0, c1 = max(cols[0] - 3, 0), min(cols[-1] + 3, lattice.n - 1)
    lat = Lattice(float(ts[0]), L.dt, ts.size, float(lattice.x[c0]), lattice.dx, c1 - c0 + 1)
    s = out[:, c0 : c1 + 1].copy()
    s[0] = s[-1] = 0.0
    s[:, 0] = s[:, -1] = 0.0
    return GridBump(lat, s)


def _zero_grid(L: Lattice) -> GridBump:
    return GridBump(Lattice(L.t0, L.dt, 3, L.x0, L.dx, 3), np.zeros((3, 3)))


# ---------------------------------------------------------------------------
# decomposition


def decompose(
    f0: TestFunction,
    chi: Cutoff,
    model: FieldModel = FieldModel(),
    frame: Frame = Frame(),
    grid: RapidityGrid = DEFAULT_GRID,
    tail_tol: float = 1e-10,
):
    """``(chi f0, (1 - chi) f0, exp{+i Im W2(part_out, part_in)})``.

    ``W(f0) = phase * W(part_out) W(part_in)``.
    """
    g = as_grid(f0) if not f0.is_zero else None
    if g is None:
        return Zero(), Zero(), 1.0 + 0.0j
    T, X = g.lattice.mesh()
    c = chi(T, X)
    inn = GridBump(g.lattice, c * g.samples)
    out = GridBump(g.lattice, (1.0 - c) * g.samples)
    if out.is_zero or inn.is_zero:
        return inn, out, 1.0 + 0.0j
    p_out = on_shell_profile(out, grid, model, frame, tail_tol=tail_tol)
    p_in = on_shell_profile(inn, grid, model, frame, tail_tol=tail_tol)
    im = w2(p_out, p_in).imag
    return inn, out, complex(np.exp(1j * im))


# ---------------------------------------------------------------------------
# full pipeline


@dataclass(frozen=True)
class TimesliceParams:
    margin_in: float = 1.0  # U1 = completion inflated by this null margin
    margin_out: float = 2.5  # U2 (support of the spacetime bump)
    frame_margin: float = 0.25
    slab_fraction: float = 0.8  # slab half-width as a fraction of margin_in / 2
    half_width: float = 12.0
    seam_margin: float = 0.5
    mass: float = 1.0
    theta_max: float = 5.5
    theta_step: float = 0.005
    tail_tol: float = 1e-10  # cut parts decay only like exp(-c sqrt(k))

    def __post_init__(self):
        if not 0 < self.margin_in < self.margin_out:
            raise ValueError("need 0 < margin_in < margin_out")
        if not 0 < self.slab_fraction < 1:
            raise ValueError("slab_fraction must lie in (0, 1)")

    @property
    def grid(self) -> RapidityGrid:
        return RapidityGrid(self.theta_max, self.theta_step)

    @property
    def model(self) -> FieldModel:
        return FieldModel(self.mass)


@dataclass
class TimesliceReport:
    path: str
    zeta: float
    error: float
    regions: dict
    frame: dict
    certificates: dict
    phase: complex
    slab: dict | None = None
    supports: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    part_in: TestFunction | None = None
    part_out: TestFunction | None = None
    f0: TestFunction | None = None

    def to_json(self) -> dict:
        return {
            "path": self.path,
            "zeta": self.zeta,
            "error": self.error,
            "regions": self.regions,
            "frame": self.frame,
            "certificates": self.certificates,
            "phase": {"re": self.phase.real, "im": self.phase.imag},
            "slab": self.slab,
            "supports": self.supports,
            **self.extra,
        }


def _stage(name):
    def deco(fn):
        def wrapped(*a, **k):
            try:
                return fn(*a, **k)
            except TimesliceError:
                raise
            except (ValueError, ArithmeticError, GeometryError) as exc:
                raise TimesliceError(name, str(exc)) from exc

        return wrapped

    return deco


def general_error(f: TestFunction, U: Region, zeta: float, params: TimesliceParams = TimesliceParams(), *, oracle: bool = False) -> TimesliceReport:
    """Approximation error for a coherent state probed from a bounded region ``U``."""
    grid, model = params.grid, params.model

    @_stage("geometry")
    def geometry():
        if U.is_empty or not U.bounded:
            raise GeometryError("U must be bounded and non-empty")
        Uc = causal_completion(U)
        Up = causal_complement(U)
        bb = Uc.bounding_box()
        U1 = Region([bb.inflate(params.margin_in)])
        U2 = Region([bb.inflate(params.margin_out)])
        frame = select_frame(U2, params.frame_margin)
        return Uc, Up, U1, U2, frame

    Uc, Up, U1, U2, frame = geometry()
    regions = {k: v.to_literal() for k, v in (("U", U), ("U_completion", Uc), ("U1", U1), ("U2", U2))}
    frame_json = {"translation": [frame.translation.x0, frame.translation.x1], "rapidity_offset": frame.rapidity_offset}
    certs: dict = {}
    routing: dict = {}

    if f.is_zero:
        return TimesliceReport("zero", zeta, 0.0, regions, frame_json, {}, 1.0 + 0.0j, extra={"routing": {"zero_function": True}})

    supp = f.support_region()
    routing["supp_f_in_U_complement"] = supp.issubset(Up)
    if routing["supp_f_in_U_complement"]:
        certs["supp_f_spacelike_to_U"] = relate(supp, U).spacelike_separated
        return TimesliceReport(
            "degenerate",
            zeta,
            0.0,
            regions,
            frame_json,
            certs,
            1.0 + 0.0j,
            supports={"f": _bb(supp)},
            extra={"routing": routing},
            part_in=Zero(),
            part_out=f,
            f0=f,
        )

    routing["supp_f_in_U1_or_U_complement"] = supp.issubset(U1 | Up)
    slab_json = None
    if routing["supp_f_in_U1_or_U_complement"]:
        path = "fast"
        f0 = f
    else:
        path = "slab"

        @_stage("slab_reduce")
        def reduce():
            g = as_grid(f)
            bb = Uc.bounding_box()
            tc = 0.5 * (0.5 * (bb.u_lo + bb.v_lo) + 0.5 * (bb.u_hi + bb.v_hi))
            half = params.slab_fraction * params.margin_in / 2
            slab = SlabSpec(tc - half, tc + half)
            xc = 0.5 * (0.5 * (bb.v_lo - bb.u_hi) + 0.5 * (bb.v_hi - bb.u_lo))
            lat = SpectralLattice.around(g.lattice, params.half_width, center=xc)
            return slab, slab_reduce(g, slab, lat, model, seam_margin=params.seam_margin)

        slab, f0 = reduce()
        slab_json = {"t1": slab.t1, "t2": slab.t2}
        f0_supp = f0.support_region()
        certs["supp_f0_in_U1_or_U_complement"] = f0_supp.issubset(U1 | Up)
        if not certs["supp_f0_in_U1_or_U_complement"]:
            raise TimesliceError("slab_reduce", "f0 escapes U1 union U' (slab too wide for margin_in)")

    @_stage("decompose")
    def split():
        chi = NullBoxBump(U1.bounding_box(), U2.bounding_box())
        return chi, decompose(f0, chi, model, frame, grid, params.tail_tol)

    chi, (part_in, part_out, phase) = split()
    s_in = part_in.support_region()
    s_out = part_out.support_region()
    certs["part_in_in_U2"] = s_in.issubset(U2)
    certs["part_out_spacelike_to_U"] = relate(s_out, U).spacelike_separated
    certs["part_in_in_left_wedge"] = frame.region_to_frame(s_in).issubset(W_L)
    if not (certs["part_in_in_U2"] and certs["part_out_spacelike_to_U"] and certs["part_in_in_left_wedge"]):
        raise TimesliceError("decompose", f"support certification failed: {certs}")

    @_stage("error")
    def err():
        if part_in.is_zero:
            return 0.0, None
        eng = rserror.WedgeEngine(part_in, grid, model, frame, tail_tol=params.tail_tol)
        e = rserror.error_exact(zeta=zeta, engine=eng)
        o = rserror.error_oracle(zeta=zeta, engine=eng) if oracle else None
        return e, o

    e, o = err()
    extra = {"routing": routing, "effective_support": not rserror._is_exact(f), "cutoff": {"plateau": list(chi.plateau), "support": list(chi.support)}}
    if o is not None:
        extra["oracle_error"] = o
    return TimesliceReport(
        path,
        zeta,
        e,
        regions,
        frame_json,
        certs,
        phase,
        slab_json,
        {"f": _bb(supp), "part_in": _bb(s_in), "part_out": _bb(s_out)},
        extra,
        part_in,
        part_out,
        f0,
    )


def _bb(r: Region):
    return [] if r.is_empty else Region([r.bounding_box()]).to_literal()


def report_json(rep: TimesliceReport) -> str:
    return json.dumps(rep.to_json(), indent=2, sort_keys=True, allow_nan=True)
