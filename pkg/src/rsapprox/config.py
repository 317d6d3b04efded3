"""Run configuration: YAML files validated by pydantic models.

Validation errors are reported with the line of the offending key.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Annotated, Any, Literal, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .geometry import Frame, GeometryError, Point2, Region
from .testfn import AnalyticGaussian, FieldModel, GridBump, Lattice, RapidityGrid, Sum, TestFunction, Zero


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _region(v) -> Region:
    try:
        return Region.from_literal(v)
    except GeometryError as exc:
        raise ValueError(str(exc)) from exc


# ---------------------------------------------------------------------------
# test-function literals


class ZeroSpec(_Strict):
    kind: Literal["zero"]

    def build(self, base: Path | None = None) -> TestFunction:
        return Zero()


class GaussianSpec(_Strict):
    kind: Literal["gaussian"]
    amplitude: float = 1.0
    center: tuple[float, float]
    sigma: float = Field(gt=0)
    k0: float = 0.0
    k1: float = 0.0
    phase: float = 0.0

    def build(self, base=None) -> TestFunction:
        return AnalyticGaussian(self.amplitude, Point2(*self.center), self.sigma, self.k0, self.k1, self.phase)


class BumpSpec(_Strict):
    """Product bump ``amplitude * b((t - t_c)/a_t) b((x - x_c)/a_x)``."""

    kind: Literal["bump"]
    amplitude: float = 1.0
    center: tuple[float, float]
    half_widths: tuple[Annotated[float, Field(gt=0)], Annotated[float, Field(gt=0)]]
    spacing: tuple[Annotated[float, Field(gt=0)], Annotated[float, Field(gt=0)]] = (0.02, 0.02)

    def build(self, base=None) -> TestFunction:
        return GridBump.bump(Point2(*self.center), *self.half_widths, amplitude=self.amplitude, dt=self.spacing[0], dx=self.spacing[1])


class LatticeSpec(_Strict):
    t0: float
    dt: float = Field(gt=0)
    nt: int = Field(ge=1)
    x0: float
    dx: float = Field(gt=0)
    nx: int = Field(ge=1)


class PayloadSpec(_Strict):
    """Lattice samples from a CSV (one row per time node) or raw float64 file."""

    kind: Literal["grid"]
    lattice: LatticeSpec
    path: str
    format: Literal["csv", "f64le"] = "csv"

    def build(self, base: Path | None = None) -> TestFunction:
        p = Path(self.path)
        if base is not None and not p.is_absolute():
            p = base / p
        L = self.lattice
        try:
            if self.format == "csv":
                data = np.loadtxt(p, delimiter=",", ndmin=2)
            else:
                data = np.fromfile(p, dtype="<f8")
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load payload {p}: {exc}") from exc
        if data.size != L.nt * L.nx:
            raise ConfigError(f"payload {p} holds {data.size} values, lattice declares {L.nt}x{L.nx}")
        return GridBump(Lattice(**L.model_dump()), data.reshape(L.nt, L.nx))


class SumSpec(_Strict):
    kind: Literal["sum"]
    components: list["FunctionSpec"]

    def build(self, base=None) -> TestFunction:
        return Sum(tuple(c.build(base) for c in self.components))


FunctionSpec = Annotated[Union[ZeroSpec, GaussianSpec, BumpSpec, PayloadSpec, SumSpec], Field(discriminator="kind")]
SumSpec.model_rebuild()


# ---------------------------------------------------------------------------
# sections


class ModelSpec(_Strict):
    mass: float = Field(1.0, gt=0)


class GridSpec(_Strict):
    theta_max: float = Field(5.5, gt=0)
    theta_step: float = Field(0.005, gt=0)

    def build(self) -> RapidityGrid:
        return RapidityGrid(self.theta_max, self.theta_step)


class Tolerances(_Strict):
    tail: float = Field(1e-12, gt=0)
    clamp: float = 1e-10
    imag: float = 1e-10
    oracle_rel: float = 1e-8
    contour: float = 1e-6
    convolution: float = 1e-8
    closed_form: float = 1e-10
    hermiticity: float = 1e-10
    boost_two_path: float = 1e-6
    microcausality: float = 1e-6


class FrameSpec(_Strict):
    translation: tuple[float, float] = (0.0, 0.0)
    rapidity_offset: float = 0.0

    def build(self) -> Frame:
        return Frame(Point2(*self.translation), self.rapidity_offset)


class TimesliceSpec(_Strict):
    region: Any
    margin_in: float = Field(1.0, gt=0)
    margin_out: float = Field(2.5, gt=0)
    frame_margin: float = Field(0.25, gt=0)
    slab_fraction: float = Field(0.8, gt=0, lt=1)
    half_width: float = Field(12.0, gt=0)
    seam_margin: float = Field(0.5, ge=0)
    tail: float = Field(1e-10, gt=0)
    oracle: bool = True

    @field_validator("region")
    @classmethod
    def _check_region(cls, v):
        _region(v)
        return v

    @model_validator(mode="after")
    def _margins(self):
        if not self.margin_in < self.margin_out:
            raise ValueError("margin_in must be smaller than margin_out")
        return self


class GeometrySpec(_Strict):
    op: Literal["complement", "completion", "future", "past", "union", "intersection", "difference", "relate", "select_frame", "inflate"]
    a: Any
    b: Any = None
    margin: float | None = None

    @field_validator("a", "b")
    @classmethod
    def _check_region(cls, v):
        if v is not None:
            _region(v)
        return v

    @model_validator(mode="after")
    def _operands(self):
        if self.op in ("union", "intersection", "difference", "relate") and self.b is None:
            raise ValueError(f"op {self.op!r} needs operand b")
        if self.op in ("select_frame", "inflate") and self.margin is None:
            raise ValueError(f"op {self.op!r} needs margin")
        return self


class VerifySpec(_Strict):
    suites: list[
        Literal["hermiticity", "microcausality", "convolution", "contour", "oracle", "geometry"]
    ] = ["hermiticity", "microcausality", "convolution", "contour", "oracle", "geometry"]
    random_trials: int = Field(20, ge=1)
    contour_zeta: float = Field(0.2, gt=0)
    oracle_zetas: list[Annotated[float, Field(gt=0)]] = [0.5, 0.1, 0.02]


class RunConfig(_Strict):
    model: ModelSpec = ModelSpec()
    grid: GridSpec = GridSpec()
    tolerances: Tolerances = Tolerances()
    function: FunctionSpec = BumpSpec(kind="bump", amplitude=3.0, center=(0.0, -3.0), half_widths=(1.0, 1.0))
    frame: FrameSpec = FrameSpec()
    zetas: list[Annotated[float, Field(gt=0)]] = [0.5, 0.1, 0.02, 0.01, 0.003, 0.001, 0.0003, 0.0001]
    timeslice: TimesliceSpec | None = None
    geometry: GeometrySpec | None = None
    verify: VerifySpec = VerifySpec()
    seed: int = Field(0, ge=0, lt=2**64)

    def model_build(self) -> FieldModel:
        return FieldModel(self.model.mass)

    def effective(self) -> dict:
        """Every parameter with defaults filled in (JSON-ready)."""
        return self.model_dump(mode="json")


# ---------------------------------------------------------------------------
# loading with line anchors


def _line_of(node, loc) -> int | None:
    line = node.start_mark.line + 1 if node is not None else None
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            nxt = None
            for k, v in node.value:
                if k.value == key:
                    nxt = v
                    line = k.start_mark.line + 1
                    break
            if nxt is None:
                return line
            node = nxt
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
            line = node.start_mark.line + 1
        else:
            # discriminator tags and similar synthetic loc entries
            continue
    return line


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark else source
        raise ConfigError(f"{where}: YAML syntax error: {getattr(exc, 'problem', exc)}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{source}:1: top level must be a mapping")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        msgs = []
        for err in exc.errors():
            loc = err["loc"]
            line = _line_of(node, loc)
            path = ".".join(str(p) for p in loc)
            msgs.append(f"{source}:{line}: {path}: {err['msg']}")
        raise ConfigError("\n".join(msgs)) from exc


def load_config(path: str | Path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{p}: cannot read config: {exc.strerror}") from exc
    return parse_config(text, str(p))


def region(v) -> Region:
    return _region(v)
