"""Grid sweeps of the decomposition over up to two coefficients of a VAR model."""

from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError, PredInfoError
from .gaussian_info import InfoContext, to_bits
from .lagged_moments import DEFAULT_Q
from .lattice import decompose
from .pipeline import AnalysisSettings, analyze_series
from .surrogates import result_measures
from .var_model import VarModel, check_stability, simulate_var

SCHEMA = "predinfo.sweep/1"


@dataclass(frozen=True)
class SweptParam:
    """One coefficient entry ``coeffs[lag - 1][row, col]`` varied over a linear grid."""

    name: str
    lag: int
    row: int
    col: int
    min: float
    max: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    base: VarModel
    params: tuple
    outputs: Optional[tuple] = None

    def __post_init__(self):
        if not 1 <= len(self.params) <= 2:
            raise InputError("a sweep varies one or two coefficients")
        for p in self.params:
            if not 1 <= p.lag <= self.base.order:
                raise InputError(f"{p.name}: lag {p.lag} outside 1..{self.base.order}")
            if not (0 <= p.row < self.base.n_vars and 0 <= p.col < self.base.n_vars):
                raise InputError(f"{p.name}: entry ({p.row}, {p.col}) out of range")
            if p.steps < 1:
                raise InputError(f"{p.name}: steps must be >= 1")

    def model_at(self, values) -> VarModel:
        coeffs = np.array(self.base.coeffs)
        for p, v in zip(self.params, values):
            coeffs[p.lag - 1, p.row, p.col] = v
        return VarModel(coeffs, self.base.innov_cov)

    def grid(self):
        return list(itertools.product(*(p.values() for p in self.params)))

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        try:
            base = VarModel.from_dict(d["base"])
            params = tuple(
                SweptParam(
                    str(p["name"]), int(p["lag"]), int(p["row"]), int(p["col"]),
                    float(p["min"]), float(p["max"]), int(p["steps"]),
                )
                for p in d["params"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"invalid sweep spec: {exc}") from exc
        outputs = tuple(d["outputs"]) if d.get("outputs") else None
        return cls(base, params, outputs)


def three_unit_model(c21: float = 0.0, c31: float = 0.0) -> VarModel:
    """Three-unit VAR(2) with lag-2 self-dependencies and lag-1 couplings.

    Self-dependencies 0.5, 0.15, 0.5; couplings 2 -> 3 of 0.15 and
    3 -> 2 of 0.5; ``c21`` and ``c31`` drive units 2 and 3 from unit 1.
    Unit innovations.
    """
    a1 = np.zeros((3, 3))
    a1[1, 0], a1[2, 0] = c21, c31
    a1[2, 1], a1[1, 2] = 0.15, 0.5
    a2 = np.diag([0.5, 0.15, 0.5])
    return VarModel(np.stack([a1, a2]), np.eye(3))


def three_unit_spec(steps: int = 26, lo: float = 0.0, hi: float = 0.5) -> SweepSpec:
    return SweepSpec(
        three_unit_model(),
        (
            SweptParam("c21", 1, 1, 0, lo, hi, steps),
            SweptParam("c31", 1, 2, 0, lo, hi, steps),
        ),
    )


PRESETS = {"three-unit": three_unit_spec}


def _evaluate(args):
    spec, values, q, estimate, seed, max_order = args
    row = {p.name: float(v) for p, v in zip(spec.params, values)}
    model = spec.model_at(values)
    radius, stable = check_stability(model)
    row["radius"] = radius
    if not stable:
        row["status"] = "unstable"
        return row
    try:
        if estimate:
            series = simulate_var(model, estimate, seed=seed)
            settings = AnalysisSettings(max_order=max_order, q=max(q, max_order))
            res = analyze_series(series, settings).result
        else:
            res = decompose(InfoContext.from_model(model, q=max(q, model.order)))
    except PredInfoError as exc:
        row["status"] = f"error: {exc}"
        return row
    row["status"] = "ok"
    row.update(result_measures(res))
    return row


def run_sweep(
    spec: SweepSpec,
    q: int = DEFAULT_Q,
    estimate: Optional[int] = None,
    seed: int = 0,
    max_order: int = 6,
    jobs: int = 1,
) -> list:
    """Evaluate the decomposition at every grid point, in row-major order.

    By default each point is computed analytically from the parameters. With
    ``estimate=T`` each point is instead simulated for ``T`` samples and
    re-estimated (BIC order selection up to ``max_order``). Unstable points
    yield a row with ``status == "unstable"`` and no measures.
    """
    tasks = [(spec, v, q, estimate, seed, max_order) for v in spec.grid()]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_evaluate, tasks, chunksize=8))
    return [_evaluate(t) for t in tasks]


def sweep_columns(spec: SweepSpec) -> list:
    n = spec.base.n_vars
    measures = (
        ["pi"]
        + [f"mi_{i + 1}" for i in range(n)]
        + [f"unique_{i + 1}" for i in range(n)]
        + ["redundancy", "synergy", "delta_wms", "delta_pid"]
    )
    if spec.outputs:
        unknown = set(spec.outputs) - set(measures)
        if unknown:
            raise InputError(f"unknown sweep outputs: {sorted(unknown)}")
        measures = [m for m in measures if m in spec.outputs]
    return [p.name for p in spec.params] + ["status", "radius"] + measures


def rows_to_csv(spec: SweepSpec, rows: list, units: str = "nats") -> str:
    cols = sweep_columns(spec)
    swept = {p.name for p in spec.params} | {"status", "radius"}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        out = []
        for c in cols:
            v = row.get(c, "")
            if isinstance(v, float) and c not in swept and units == "bits":
                v = to_bits(v)
            out.append(repr(float(v)) if isinstance(v, float) else v)
        w.writerow(out)
    return buf.getvalue()
