"""Placement optimizers for the RIS-mounted UAV.

Three solvers plus a brute-force oracle:

* projected gradient ascent over the D2D throughput (exclusion zones around
  every pair endpoint),
* the same ascent over the CU throughput (exclusion zones around CUs),
* a directional coordinate search that reconciles the two positions by
  minimizing the per-capita throughput ratio deviation,
* an exhaustive grid evaluator used as the independent test oracle.

Link classes are re-derived at every iterate, so the ascent objective is
piecewise-smooth; gradients are taken on the current smooth piece.  Raw
iterates may oscillate near class boundaries, which is why results carry
the full trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import _kernels
from .channel import (
    ChannelBuilder,
    ChannelState,
    beta_table,
    cu_prefactors,
    d2d_prefactors,
    eta_all,
    lambda_all,
)
from .geometry import Position3, horizontal_distance
from .scenario import Scenario
from .throughput import RateReport, net_throughput, ratio_from_totals

_LN2 = math.log(2.0)


class StopReason(Enum):
    GRAD_SMALL = "grad_small"
    STEP_SMALL = "step_small"
    MAX_ITERS = "max_iters"
    SEARCH_EXHAUSTED = "search_exhausted"


@dataclass(frozen=True)
class OptimizerConfig:
    """Gradient-ascent parameters.

    `tolerance` doubles as the gradient-norm/step stopping threshold and
    the exclusion-disc radius around users; `displacement` is the push
    applied when an iterate lands inside an exclusion disc and must exceed
    the tolerance so a push cannot register as a converged step.  `bounds`
    is the (r_min, r_max) box at flight height; None means the scenario
    region.
    """

    learning_rate: float = 0.1
    tolerance: float = 1e-4
    displacement: float = 1.0
    max_iters: int = 10_000
    bounds: tuple | None = None

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.displacement <= self.tolerance:
            raise ValueError(
                f"displacement {self.displacement} must exceed tolerance {self.tolerance}"
            )
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.bounds is not None:
            r_min, r_max = self.bounds
            if not (r_min.x < r_max.x and r_min.y < r_max.y):
                raise ValueError(f"bounds must satisfy r_min < r_max, got {self.bounds}")
            if r_min.z != r_max.z:
                raise ValueError("bounds must share the flight height")


@dataclass(frozen=True)
class SearchConfig:
    """Directional coordinate-search parameters; None bounds mean the
    scenario region."""

    num_directions: int = 360
    step_size: float = 1.0
    max_steps: int = 300
    bounds: tuple | None = None

    def __post_init__(self):
        if self.num_directions < 1:
            raise ValueError(f"num_directions must be >= 1, got {self.num_directions}")
        if self.step_size <= 0:
            raise ValueError(f"step_size must be > 0, got {self.step_size}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")


@dataclass(frozen=True)
class PlacementResult:
    """Outcome of one optimizer run.

    `trace` lists (iteration, position, objective) for every iterate
    (improvements only, for the coordinate search).  `objective` is the
    value at `position`: a throughput for the ascents, the ratio deviation
    for the joint search.  `report` carries the full rate report when the
    solver evaluated one.
    """

    position: Position3
    objective: float
    trace: tuple
    stop_reason: StopReason
    iterations: int
    report: RateReport | None = None

    def __post_init__(self):
        object.__setattr__(self, "trace", tuple(self.trace))
        if not self.trace:
            raise ValueError("trace must be nonempty")

    def running_best(self, maximize: bool = True) -> list:
        """Best-so-far objective along the trace (bookkeeping view)."""
        best = []
        cur = -math.inf if maximize else math.inf
        for _, _, obj in self.trace:
            cur = max(cur, obj) if maximize else min(cur, obj)
            best.append(cur)
        return best


def _sign(v: float) -> float:
    # +1 strictly above zero, -1 elsewhere (zero included).
    return 1.0 if v > 0.0 else -1.0


def grad_d2d(r: Position3, state: ChannelState, scn: Scenario) -> tuple[float, float]:
    """Gradient of the total D2D throughput in the horizontal plane at r,
    with link classes held fixed at the state's values."""
    beta = beta_table(scn.radio)
    eta = eta_all(state, scn)
    b1 = beta[state.hop1_class.astype(np.intp)]
    b2 = beta[state.hop2_class.astype(np.intp)]
    _, _, gx, gy = _kernels.d2d_eval(r.x, r.y, r.z, scn.tx_array, scn.rx_array, eta, b1, b2)
    return gx, gy


def grad_cu(r: Position3, state: ChannelState, scn: Scenario) -> tuple[float, float]:
    """Gradient of the total CU throughput in the horizontal plane at r,
    with link classes held fixed at the state's values."""
    beta = beta_table(scn.radio)
    lam = lambda_all(state, scn)
    b = beta[state.cu_class.astype(np.intp)]
    _, _, gx, gy = _kernels.cu_eval(r.x, r.y, r.z, scn.cu_array, lam, b)
    return gx, gy


def gradient_ascent(
    grad,
    objective,
    cfg: OptimizerConfig,
    exclusion_centers,
    r0: Position3,
) -> PlacementResult:
    """Projected gradient ascent with exclusion discs around given centers.

    Iterates r <- r + lr * grad(r); any iterate landing within `tolerance`
    (horizontal) of an exclusion center is pushed away by `displacement`
    per component before the componentwise clamp to bounds.  Stops when the
    gradient norm or the step length drops below `tolerance`, or after
    `max_iters` iterations, whichever fires first (checked in that order).
    """
    if cfg.bounds is None:
        raise ValueError("gradient_ascent needs explicit bounds")
    r_min, r_max = cfg.bounds
    eps = cfg.tolerance
    if not (r_min.x < r0.x < r_max.x and r_min.y < r0.y < r_max.y):
        raise ValueError(f"r0 {r0} not strictly inside bounds")
    for c in exclusion_centers:
        if horizontal_distance(r0, c) < eps:
            raise ValueError(f"r0 {r0} violates the exclusion disc of {c}")

    height = r0.z
    x, y = r0.x, r0.y
    gx, gy = grad(r0)
    trace = [(0, r0, objective(r0))]
    k = 0
    while True:
        k += 1
        nx = x + cfg.learning_rate * gx
        ny = y + cfg.learning_rate * gy
        for c in exclusion_centers:
            dx = nx - c.x
            dy = ny - c.y
            if math.hypot(dx, dy) < eps:
                nx += _sign(dx) * cfg.displacement
                ny += _sign(dy) * cfg.displacement
        nx = min(max(nx, r_min.x), r_max.x)
        ny = min(max(ny, r_min.y), r_max.y)
        r_new = Position3(nx, ny, height)
        trace.append((k, r_new, objective(r_new)))
        gx, gy = grad(r_new)
        step = math.hypot(nx - x, ny - y)
        x, y = nx, ny
        if math.hypot(gx, gy) < eps:
            reason = StopReason.GRAD_SMALL
            break
        if step < eps:
            reason = StopReason.STEP_SMALL
            break
        if k >= cfg.max_iters:
            reason = StopReason.MAX_ITERS
            break
    return PlacementResult(
        position=trace[-1][1],
        objective=trace[-1][2],
        trace=trace,
        stop_reason=reason,
        iterations=k,
    )


class _AscentProblem:
    """Classify-and-evaluate closure for one ascent run.

    Re-derives link classes at every requested position from the trial's
    frozen fading draw; memoizes the last position so that the objective
    and gradient callbacks share a single evaluation per iterate.
    """

    def __init__(self, scn: Scenario, state: ChannelState, kind: str):
        self.scn = scn
        self.kind = kind
        self.boxes = scn.obstacle_array
        self.beta = beta_table(scn.radio)
        if kind == "d2d":
            self.plf = d2d_prefactors(scn.radio)
            self.kappa_tab = state.table.kappa_table
        else:
            self.plf = cu_prefactors(scn.radio)
            self.f_sq_tab = state.table.f_sq_table
        self._key = None
        self._val = None

    def _evaluate(self, r: Position3):
        key = (r.x, r.y)
        if key == self._key:
            return self._val
        scn = self.scn
        if self.kind == "d2d":
            c1 = _kernels.classify_to_point(scn.tx_array, r.x, r.y, r.z, self.boxes).astype(np.intp)
            c2 = _kernels.classify_to_point(scn.rx_array, r.x, r.y, r.z, self.boxes).astype(np.intp)
            cc = c1 * 2 + c2
            eta = self.kappa_tab[np.arange(scn.num_pairs), cc] * self.plf[cc]
            _, total, gx, gy = _kernels.d2d_eval(
                r.x, r.y, r.z, scn.tx_array, scn.rx_array, eta, self.beta[c1], self.beta[c2]
            )
        else:
            cn = _kernels.classify_to_point(scn.cu_array, r.x, r.y, r.z, self.boxes).astype(np.intp)
            lam = self.f_sq_tab[np.arange(scn.num_cus), cn] * self.plf[cn]
            _, total, gx, gy = _kernels.cu_eval(
                r.x, r.y, r.z, scn.cu_array, lam, self.beta[cn]
            )
        self._key = key
        self._val = (total, gx, gy)
        return self._val

    def objective(self, r: Position3) -> float:
        return self._evaluate(r)[0]

    def grad(self, r: Position3) -> tuple[float, float]:
        _, gx, gy = self._evaluate(r)
        return gx, gy


def _resolve_bounds(bounds, scn: Scenario):
    if bounds is not None:
        return bounds
    x_lo, x_hi, y_lo, y_hi = scn.region
    h = scn.uav_height
    return (Position3(x_lo, y_lo, h), Position3(x_hi, y_hi, h))


def _default_start(bounds, exclusion_centers, cfg: OptimizerConfig) -> Position3:
    """Region-center start, nudged away from any violated exclusion disc."""
    r_min, r_max = bounds
    x = (r_min.x + r_max.x) / 2.0
    y = (r_min.y + r_max.y) / 2.0
    for _ in range(100):
        hit = False
        for c in exclusion_centers:
            dx = x - c.x
            dy = y - c.y
            if math.hypot(dx, dy) < cfg.tolerance:
                x += _sign(dx) * cfg.displacement
                y += _sign(dy) * cfg.displacement
                hit = True
        x = min(max(x, r_min.x), r_max.x)
        y = min(max(y, r_min.y), r_max.y)
        if not hit:
            break
    return Position3(x, y, r_min.z)


def optimize_d2d(
    scn: Scenario,
    state: ChannelState,
    cfg: OptimizerConfig,
    r0: Position3 | None = None,
) -> PlacementResult:
    """Gradient-ascent placement maximizing total D2D throughput.

    Exclusion discs sit on every pair endpoint.  Worst-case cost is one
    classify-and-rate pass over all pairs per iteration.
    """
    if scn.num_pairs == 0:
        raise ValueError("optimize_d2d needs at least one D2D pair")
    bounds = _resolve_bounds(cfg.bounds, scn)
    cfg = _with_bounds(cfg, bounds)
    centers = [p for pair in scn.d2d_pairs for p in pair]
    if r0 is None:
        r0 = _default_start(bounds, centers, cfg)
    problem = _AscentProblem(scn, state, "d2d")
    return gradient_ascent(problem.grad, problem.objective, cfg, centers, r0)


def optimize_cu(
    scn: Scenario,
    state: ChannelState,
    cfg: OptimizerConfig,
    r0: Position3 | None = None,
) -> PlacementResult:
    """Gradient-ascent placement maximizing total CU throughput."""
    if scn.num_cus == 0:
        raise ValueError("optimize_cu needs at least one CU")
    bounds = _resolve_bounds(cfg.bounds, scn)
    cfg = _with_bounds(cfg, bounds)
    centers = list(scn.cus)
    if r0 is None:
        r0 = _default_start(bounds, centers, cfg)
    problem = _AscentProblem(scn, state, "cu")
    return gradient_ascent(problem.grad, problem.objective, cfg, centers, r0)


def _with_bounds(cfg: OptimizerConfig, bounds) -> OptimizerConfig:
    return OptimizerConfig(
        learning_rate=cfg.learning_rate,
        tolerance=cfg.tolerance,
        displacement=cfg.displacement,
        max_iters=cfg.max_iters,
        bounds=bounds,
    )


def joint_search(
    r_d: Position3,
    r_c: Position3,
    phi: float,
    cfg: SearchConfig,
    scn: Scenario,
    builder: ChannelBuilder,
) -> PlacementResult:
    """Directional coordinate search for the joint RIS/UAV position.

    Starts at the midpoint of the two single-population optima and pattern-
    searches the ratio deviation: for each of `num_directions` equally
    spaced directions (angle-major order), the current best point walks
    step_size at a time while the deviation strictly improves, up to
    max_steps accepted moves per direction; a non-improving or out-of-
    bounds candidate turns to the next direction.  The anchor is the
    initial best, so the result never exceeds the anchor's deviation, and
    when r_d equals r_c the anchor itself comes back unchanged.  The trace
    lists the anchor and every accepted move; `report` holds the full rate
    report at the returned position; `iterations` counts objective
    evaluations.
    """
    if scn.num_pairs == 0 or scn.num_cus == 0:
        raise ValueError("joint_search needs at least one D2D pair and one CU")
    bounds = _resolve_bounds(cfg.bounds, scn)
    s_min, s_max = bounds
    h = scn.uav_height
    for p, name in ((r_d, "r_d"), (r_c, "r_c")):
        if not (s_min.x <= p.x <= s_max.x and s_min.y <= p.y <= s_max.y):
            raise ValueError(f"{name} {p} outside search bounds")
    x0 = (r_d.x + r_c.x) / 2.0
    y0 = (r_d.y + r_c.y) / 2.0
    table = builder.table
    best_x, best_y, best_t, evals, improvements = _kernels.joint_scan(
        x0,
        y0,
        h,
        cfg.num_directions,
        cfg.step_size,
        cfg.max_steps,
        s_min.x,
        s_max.x,
        s_min.y,
        s_max.y,
        scn.tx_array,
        scn.rx_array,
        scn.cu_array,
        scn.obstacle_array,
        table.kappa_table,
        table.f_sq_table,
        d2d_prefactors(scn.radio),
        cu_prefactors(scn.radio),
        beta_table(scn.radio),
        phi,
    )
    best = Position3(best_x, best_y, h)
    trace = [(ordinal, Position3(px, py, h), t) for ordinal, px, py, t in improvements]
    report = net_throughput(best, builder.at(best), scn)
    return PlacementResult(
        position=best,
        objective=best_t,
        trace=trace,
        stop_reason=StopReason.SEARCH_EXHAUSTED,
        iterations=evals,
        report=report,
    )


def percapita_ratio(d2d_total: float, cu_total: float, scn: Scenario) -> float:
    """Ratio of per-CU to per-pair average throughput (the phi of one trial)."""
    return ratio_from_totals(d2d_total, cu_total, scn.num_pairs, scn.num_cus)


def grid_oracle(objective, bounds, resolution: float):
    """Exhaustive argmax of `objective` over a uniform grid.

    Scans x-major (x outer, y inner) with strict improvement, so ties keep
    the first grid point in scan order.  Returns (position, value).
    """
    if resolution <= 0:
        raise ValueError(f"resolution must be > 0, got {resolution}")
    r_min, r_max = bounds
    nx = int(math.floor((r_max.x - r_min.x) / resolution + 1e-9)) + 1
    ny = int(math.floor((r_max.y - r_min.y) / resolution + 1e-9)) + 1
    best_pos = None
    best_val = -math.inf
    for i in range(nx):
        x = r_min.x + resolution * i
        for j in range(ny):
            y = r_min.y + resolution * j
            pos = Position3(x, y, r_min.z)
            val = objective(pos)
            if val > best_val:
                best_val = val
                best_pos = pos
    return best_pos, best_val


def write_trace_csv(result: PlacementResult, path) -> None:
    """Dump a result's trace as iter,x,y,objective rows (convergence plots)."""
    lines = ["iter,x,y,objective"]
    for it, pos, obj in result.trace:
        lines.append(f"{it},{pos.x!r},{pos.y!r},{obj!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
