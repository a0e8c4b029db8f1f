"""Parameter-grid driver: per-point observables, CSV and SVG emission.

Rows always come back in row-major order (axis1 outer, axis2 inner) no
matter how many worker processes evaluate the grid.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from threadpoolctl import threadpool_limits

from kondoqet.eigen import ground_state
from kondoqet.entanglement import (
    bound_eq10_margin,
    half_chain_entropy,
    magnetization,
    operator_norm,
    reduced_density,
    von_neumann_entropy,
)
from kondoqet.errors import StructuralError
from kondoqet.model import ModelParams, bob_local_hamiltonian, build_hamiltonian
from kondoqet.qet import protocol_for_ground

log = logging.getLogger(__name__)

AXIS_FIELDS = {"Delta": "Delta", "B": "B", "Jk": "Jk"}
AXIS_COLUMNS = {"Delta": "delta", "B": "b", "Jk": "jk"}
CSV_COLUMNS = (
    "delta", "b", "jk", "d", "e0", "gap", "m", "s_lr", "xi", "eta", "theta",
    "e_b_closed", "e_b_direct", "e_teleported", "s_a_comp", "bound_margin", "degenerate",
)  # fmt: skip
OBSERVABLES = CSV_COLUMNS[4:16]
RYDBERG_EXPONENT = 6


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.name not in AXIS_FIELDS:
            raise StructuralError(f"axis name must be one of {sorted(AXIS_FIELDS)}, got {self.name!r}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise StructuralError(f"axis {self.name}: need finite lo < hi, got [{self.lo}, {self.hi}]")
        if isinstance(self.steps, bool) or not isinstance(self.steps, int) or self.steps < 2:
            raise StructuralError(f"axis {self.name}: steps must be an integer >= 2, got {self.steps!r}")

    def values(self) -> list[float]:
        span = self.hi - self.lo
        last = self.steps - 1
        return [self.lo if i == 0 else self.hi if i == last else self.lo + span * i / last for i in range(self.steps)]

    @property
    def column(self) -> str:
        return AXIS_COLUMNS[self.name]


@dataclass(frozen=True)
class SweepConfig:
    base: ModelParams = field(default_factory=ModelParams)
    axis1: Axis = field(default_factory=lambda: Axis("Delta", -2.0, 2.0, 41))
    axis2: Axis | None = field(default_factory=lambda: Axis("B", 0.0, 1.5, 41))
    outputs: tuple[str, ...] = ("s_lr", "e_teleported")
    emit: tuple[str, ...] = ("csv",)
    workers: int = 1

    def __post_init__(self):
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise StructuralError("axis names must be distinct")
        for name in self.outputs:
            if name not in OBSERVABLES:
                raise StructuralError(f"unknown observable {name!r}; choose from {OBSERVABLES}")
        for kind in self.emit:
            if kind not in ("csv", "svg"):
                raise StructuralError(f"unknown emit kind {kind!r}")
        if self.workers < 1:
            raise StructuralError("workers must be >= 1")

    def points(self) -> list[ModelParams]:
        out = []
        for v1 in self.axis1.values():
            p = self.base.replace(**{AXIS_FIELDS[self.axis1.name]: v1})
            if self.axis2 is None:
                out.append(p)
                continue
            out.extend(p.replace(**{AXIS_FIELDS[self.axis2.name]: v2}) for v2 in self.axis2.values())
        return out


@dataclass(frozen=True)
class SweepRow:
    delta: float
    b: float
    jk: float
    d: int
    e0: float = math.nan
    gap: float = math.nan
    m: float = math.nan
    s_lr: float = math.nan
    xi: float = math.nan
    eta: float = math.nan
    theta: float = math.nan
    e_b_closed: float = math.nan
    e_b_direct: float = math.nan
    e_teleported: float = math.nan
    s_a_comp: float = math.nan
    bound_margin: float = math.nan
    degenerate: bool = False
    error: str | None = None

    def get(self, column: str):
        return getattr(self, column)


def evaluate_point(params: ModelParams) -> SweepRow:
    """All observables at one parameter point; failures come back as a NaN row."""
    key = dict(delta=params.Delta, b=params.B, jk=params.Jk, d=params.coupled_site - 1)
    try:
        params.check_protocol()
        h = build_hamiltonian(params)
        ground = ground_state(h, n=params.N)
        g = ground.state
        res = protocol_for_ground(params, h, ground)
        block = bob_local_hamiltonian(params, g)
        s_a = von_neumann_entropy(reduced_density(g, [params.n_A]))
        return SweepRow(
            **key,
            e0=ground.e0,
            gap=ground.gap,
            m=magnetization(g),
            s_lr=half_chain_entropy(g),
            xi=res.xi,
            eta=res.eta,
            theta=res.theta,
            e_b_closed=res.e_b_closed,
            e_b_direct=res.e_b_direct,
            e_teleported=res.e_teleported,
            s_a_comp=s_a,
            bound_margin=bound_eq10_margin(s_a, res.e_teleported, operator_norm(block.op)),
            degenerate=ground.degenerate,
        )
    except Exception as exc:  # noqa: BLE001 - one bad point must not abort the grid
        log.warning("grid point %s failed: %s", key, exc)
        return SweepRow(**key, error=f"{type(exc).__name__}: {exc}")


def _evaluate_chunk(points: list[ModelParams]) -> list[SweepRow]:
    with threadpool_limits(limits=1):
        return [evaluate_point(p) for p in points]


def _map_points(points: list[ModelParams], workers: int) -> list[SweepRow]:
    if workers <= 1 or len(points) < 2:
        return _evaluate_chunk(points)
    size = max(1, math.ceil(len(points) / (4 * workers)))
    chunks = [points[i : i + size] for i in range(0, len(points), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = pool.map(_evaluate_chunk, chunks)
        return [row for chunk in results for row in chunk]


def run_grid(config: SweepConfig, workers: int | None = None) -> list[SweepRow]:
    return _map_points(config.points(), workers or config.workers)


def rydberg_config(**overrides) -> SweepConfig:
    """B scan with N=8, n_A=5, n_B=8, J=0.5 and nearest-neighbour Kondo coupling 0.2."""
    base = ModelParams(N=8, J=0.5, Jk=0.2, coupled_site=2, n_A=5, n_B=8)
    cfg = SweepConfig(base=base, axis1=Axis("B", 0.0, 1.5, 41), axis2=None)
    return replace(cfg, **overrides)


def rydberg_scan(config: SweepConfig, distances=(1, 2), workers: int | None = None) -> list[SweepRow]:
    """Repeat a B scan with the impurity bonded ``d`` sites away, J_K scaled by 1/d**6."""
    if config.axis1.name != "B" or config.axis2 is not None:
        raise StructuralError("rydberg scan needs a single B axis")
    jk1 = config.base.Jk
    rows = []
    for d in distances:
        base = config.base.replace(coupled_site=1 + d, Jk=jk1 / d**RYDBERG_EXPONENT)
        rows += run_grid(replace(config, base=base), workers=workers)
    return rows


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def emit_csv(rows: list[SweepRow]) -> str:
    if not rows:
        raise StructuralError("no rows to emit")
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(_fmt(row.get(c)) for c in CSV_COLUMNS) for row in rows]
    return "\n".join(lines) + "\n"


def _grid(rows: list[SweepRow], observable: str, axis1: str, axis2: str):
    col1, col2 = AXIS_COLUMNS.get(axis1, axis1), AXIS_COLUMNS.get(axis2, axis2)
    v1 = list(dict.fromkeys(r.get(col1) for r in rows))
    v2 = list(dict.fromkeys(r.get(col2) for r in rows))
    if len(v1) < 2 or len(v2) < 2 or len(v1) * len(v2) != len(rows):
        raise StructuralError(f"rows do not form a 2-axis grid over ({axis1}, {axis2})")
    values = np.array([float(r.get(observable)) for r in rows]).reshape(len(v1), len(v2))
    return v1, v2, values


RAMP_LO = (68, 1, 84)
RAMP_HI = (253, 231, 37)
NAN_COLOR = "#bdbdbd"


def ramp_color(t: float) -> str:
    rgb = (round(a + (b - a) * t) for a, b in zip(RAMP_LO, RAMP_HI))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def emit_heatmap(rows: list[SweepRow], observable: str, axis1: str = "Delta", axis2: str = "B") -> str:
    """Self-contained SVG heatmap: axis2 runs left to right, axis1 bottom to top."""
    v1, v2, values = _grid(rows, observable, axis1, axis2)
    finite = values[np.isfinite(values)]
    vmin = float(finite.min()) if finite.size else 0.0
    vmax = float(finite.max()) if finite.size else 0.0
    cell, left, top = 12, 70, 30
    width, height = left + cell * len(v2) + 120, top + cell * len(v1) + 60
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<text x="{left}" y="18">{observable}</text>',
    ]
    for i in range(len(v1)):
        y = top + cell * (len(v1) - 1 - i)
        for j in range(len(v2)):
            val = values[i, j]
            if not math.isfinite(val):
                color = NAN_COLOR
            else:
                color = ramp_color(0.0 if vmax == vmin else (val - vmin) / (vmax - vmin))
            out.append(f'<rect x="{left + cell * j}" y="{y}" width="{cell}" height="{cell}" fill="{color}"/>')
    bottom = top + cell * len(v1)
    out += [
        f'<text x="{left}" y="{bottom + 15}">{v2[0]:.6g}</text>',
        f'<text x="{left + cell * len(v2)}" y="{bottom + 15}" text-anchor="end">{v2[-1]:.6g}</text>',
        f'<text x="{left + cell * len(v2) / 2}" y="{bottom + 35}" text-anchor="middle">{axis2}</text>',
        f'<text x="{left - 5}" y="{bottom}" text-anchor="end">{v1[0]:.6g}</text>',
        f'<text x="{left - 5}" y="{top + 10}" text-anchor="end">{v1[-1]:.6g}</text>',
        f'<text x="15" y="{top + cell * len(v1) / 2}" '
        f'transform="rotate(-90 15 {top + cell * len(v1) / 2})" text-anchor="middle">{axis1}</text>',
    ]
    lx = left + cell * len(v2) + 20
    out += [
        f'<rect x="{lx}" y="{top}" width="15" height="15" fill="{ramp_color(1.0)}"/>',
        f'<text x="{lx + 20}" y="{top + 12}">max {vmax:.6g}</text>',
        f'<rect x="{lx}" y="{top + 25}" width="15" height="15" fill="{ramp_color(0.0)}"/>',
        f'<text x="{lx + 20}" y="{top + 37}">min {vmin:.6g}</text>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class PeakReport:
    fraction: float
    peaks: tuple[tuple[float, int, int], ...]  # (axis1 value, argmax a, argmax b)


def correlate_peaks(
    rows: list[SweepRow], obs_a: str, obs_b: str, axis1: str = "Delta", axis2: str = "B", window: int = 1
) -> PeakReport:
    """Fraction of axis1 slices whose axis2 argmaxes of the two columns lie within ``window``."""
    v1, _, a = _grid(rows, obs_a, axis1, axis2)
    _, _, b = _grid(rows, obs_b, axis1, axis2)
    peaks = []
    for i, value in enumerate(v1):
        if np.all(np.isnan(a[i])) or np.all(np.isnan(b[i])):
            continue
        peaks.append((value, int(np.nanargmax(a[i])), int(np.nanargmax(b[i]))))
    if not peaks:
        return PeakReport(math.nan, ())
    hits = sum(abs(ia - ib) <= window for _, ia, ib in peaks)
    return PeakReport(hits / len(peaks), tuple(peaks))
