"""Post-processing of traces and the two comparison baselines.

Covers steady-state classification (fixed point, limit cycle, or neither),
dynamic risk priority numbers (DRPN), single-node "independent activation"
impact studies, the synchronous no-delay FCM iteration, FMEA hazard indices
and the final decision table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .engine import SimulationConfig, SimulationTrace, net_input, simulate
from .errors import ArityError, ConfigurationError, MissingNodeError, NotConvergedError
from .model import RiskModel

DEFAULT_EPSILON = 1e-6
DEFAULT_MAX_PERIOD = 20
# Fewest tail rows inspected for any period, so one repeated value inside a
# longer cycle is not mistaken for a fixed point.
MIN_WINDOW = 4


@dataclass(frozen=True)
class SteadyStateStatus:
    kind: str  # "fixed", "cycle" or "none"
    period: Optional[int] = None
    onset: Optional[float] = None

    @property
    def converged(self) -> bool:
        return self.kind != "none"


def _window(p: int) -> int:
    return max(2 * p, MIN_WINDOW)


def _holds(values: np.ndarray, p: int, start: int, epsilon: float) -> bool:
    n = len(values)
    if n - start <= p:
        return False
    diff = np.abs(values[start + p:] - values[start:n - p])
    return bool(np.all(diff <= epsilon))


def effective_max_period(n_rows: int, max_period: int = DEFAULT_MAX_PERIOD) -> int:
    """Largest usable period for a trace of ``n_rows`` rows, capped at ``max_period``."""
    return max(1, min(max_period, n_rows // 2))


def detect_steady_state(
    trace: SimulationTrace,
    epsilon: float = DEFAULT_EPSILON,
    max_period: int = DEFAULT_MAX_PERIOD,
) -> SteadyStateStatus:
    """Classify the tail of ``trace``.

    Period ``p`` is accepted when every tail row matches the row ``p`` steps
    later within ``epsilon`` (max-norm) over the final ``max(2p, 4)`` rows.
    ``p = 1`` means a fixed point.  The onset is the earliest time from which
    the accepted relation holds through the end of the trace.
    """
    return _detect(np.asarray(trace.values), np.asarray(trace.times), epsilon, max_period)


def _detect(values: np.ndarray, times: np.ndarray, epsilon: float, max_period: int) -> SteadyStateStatus:
    n = len(values)
    if n == 0:
        raise ConfigurationError("empty trace")
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    if max_period < 1 or max_period > n // 2 and n > 1:
        raise ConfigurationError(
            f"max_period {max_period} exceeds half the trace length ({n} rows)"
        )
    if n == 1:
        return SteadyStateStatus("fixed", None, float(times[0]))

    for p in range(1, max_period + 1):
        start = max(0, n - _window(p))
        if n - start < 2 * p or not _holds(values, p, start, epsilon):
            continue
        while start > 0 and _holds(values, p, start - 1, epsilon):
            start -= 1
        if p == 1:
            return SteadyStateStatus("fixed", None, float(times[start]))
        return SteadyStateStatus("cycle", p, float(times[start]))
    return SteadyStateStatus("none")


def classify_nodes(
    trace: SimulationTrace,
    epsilon: float = DEFAULT_EPSILON,
    max_period: int = DEFAULT_MAX_PERIOD,
) -> Dict[int, SteadyStateStatus]:
    """Steady-state status of each node's own column."""
    return {
        node_id: _detect(trace.values[:, [k]], trace.times, epsilon, max_period)
        for k, node_id in enumerate(trace.node_ids)
    }


def compute_drpn(trace: SimulationTrace, status: SteadyStateStatus) -> np.ndarray:
    """Final node values, averaged over one period for a limit cycle."""
    if status.kind == "fixed":
        return np.array(trace.final, dtype=float)
    if status.kind == "cycle":
        return np.mean(trace.values[-status.period:], axis=0)
    raise NotConvergedError("trace has not reached a fixed point or cycle; extend the horizon")


def independent_initial(rpns: Sequence[float], position: int) -> List[float]:
    vec = [0.0] * len(rpns)
    vec[position] = float(rpns[position])
    return vec


def independent_activation(
    model: RiskModel,
    rpns: Sequence[float],
    focus: int,
    config: SimulationConfig,
    epsilon: float = DEFAULT_EPSILON,
    max_period: int = DEFAULT_MAX_PERIOD,
) -> np.ndarray:
    """DRPN vector when only ``focus`` starts at its RPN and every other node at 0."""
    if len(rpns) != len(model):
        raise ArityError(f"{len(rpns)} RPNs for {len(model)} nodes")
    trace = simulate(model, independent_initial(rpns, model.position(focus)), config)
    status = detect_steady_state(trace, epsilon, effective_max_period(len(trace), max_period))
    return compute_drpn(trace, status)


def impact_matrix(
    model: RiskModel,
    rpns: Sequence[float],
    config: SimulationConfig,
    epsilon: float = DEFAULT_EPSILON,
    max_period: int = DEFAULT_MAX_PERIOD,
    executor=None,
    order: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Row ``i`` is the independent-activation DRPN vector for node ``i``.

    ``executor`` may be any object with a ``map`` method (e.g. a
    ``concurrent.futures`` pool); rows are always returned in node-id order.
    """
    ids = list(model.node_ids)
    run_order = list(order) if order is not None else ids
    if sorted(run_order) != sorted(ids):
        raise ArityError("run order must be a permutation of the node ids")

    def one(focus: int) -> np.ndarray:
        return independent_activation(model, rpns, focus, config, epsilon, max_period)

    mapper = executor.map if executor is not None else map
    rows = dict(zip(run_order, mapper(one, run_order)))
    return np.vstack([rows[i] for i in ids])


def most_impacted(matrix: np.ndarray, node_ids: Optional[Sequence[int]] = None) -> Tuple[int, ...]:
    """For each focus row, the other node with the largest value (lowest id on ties)."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArityError(f"impact matrix must be square, got shape {m.shape}")
    ids = list(node_ids) if node_ids is not None else list(range(1, m.shape[0] + 1))
    if len(ids) != m.shape[0]:
        raise ArityError("one node id per matrix row required")
    if len(ids) < 2:
        raise ArityError("most-impacted needs at least two nodes")
    order = sorted(range(len(ids)), key=lambda k: ids[k])
    result = []
    for i in range(len(ids)):
        best = None
        for j in order:
            if j == i:
                continue
            if best is None or m[i, j] > m[i, best]:
                best = j
        result.append(ids[best])
    return tuple(result)


def classic_fcm_iterate(
    model: RiskModel,
    initial: Optional[Sequence[float]],
    config: SimulationConfig,
) -> SimulationTrace:
    """Synchronous FCM iteration ``C_i <- f(C_i + sum_j W_ji C_j)``; delays ignored.

    Every node is updated every step, including nodes without incoming arcs.
    """
    if initial is None:
        initial = model.initial_values
    if len(initial) != len(model):
        raise ArityError(f"{len(initial)} initial values for {len(model)} nodes")
    f = config.squash
    incoming: List[List[Tuple[float, int]]] = [[] for _ in model.nodes]
    for arc in model.arcs:
        incoming[model.position(arc.target)].append((arc.weight, model.position(arc.source)))

    x = np.array(initial, dtype=float)
    rows = [x.copy()]
    everyone = frozenset(model.node_ids)
    for _ in range(config.n_steps):
        prev = x.copy()
        for i in range(len(x)):
            x[i] = f(net_input(float(prev[i]), ((w, float(prev[j])) for w, j in incoming[i])))
        rows.append(x.copy())
    times = np.arange(config.n_steps + 1) * config.step
    activations = (frozenset(),) + (everyone,) * config.n_steps
    return SimulationTrace(times, np.vstack(rows), activations, model.node_ids, model.names)


# -- FMEA baseline -----------------------------------------------------------

@dataclass(frozen=True)
class FmeaEntry:
    node_id: int
    group: str
    o: float
    s: float
    d: float
    drh: float
    drh_star: float


def fmea_hazards(
    entries: Iterable[Tuple[int, str, float, float, float]],
    influences: Mapping[int, Sequence[Tuple[int, float]]],
) -> Tuple[List[FmeaEntry], Dict[str, float]]:
    """Design-risk hazard indices and per-group product hazard indices.

    ``drh = exp(o + s + d)``; ``drh_star`` adds ``weight * drh(source)`` for
    every influence listed against the node; a group's product hazard index
    is the sum of its members' ``drh_star``.
    """
    rows = list(entries)
    drh = {node: math.exp(o + s + d) for node, _, o, s, d in rows}
    out: List[FmeaEntry] = []
    groups: Dict[str, float] = {}
    for node, group, o, s, d in rows:
        extra = []
        for source, weight in influences.get(node, ()):
            if source not in drh:
                raise MissingNodeError(f"influence source {source} of node {node} is not an FMEA entry")
            extra.append(weight * drh[source])
        star = math.fsum([drh[node], *extra])
        out.append(FmeaEntry(node, group, o, s, d, drh[node], star))
    for group in dict.fromkeys(e.group for e in out):
        groups[group] = math.fsum(e.drh_star for e in out if e.group == group)
    return out, groups


# -- Decision table ----------------------------------------------------------

@dataclass(frozen=True)
class DecisionRow:
    node_id: int
    name: str
    rpn: float
    drpn: Optional[float]
    most_impacted: Optional[int]


@dataclass(frozen=True)
class DecisionTable:
    rows: Tuple[DecisionRow, ...]
    rpn_ranking: Tuple[int, ...]
    drpn_ranking: Tuple[int, ...]


def _ranking(ids: Sequence[int], scores: Sequence[float]) -> Tuple[int, ...]:
    return tuple(i for _, i in sorted(zip(scores, ids), key=lambda si: (-si[0], si[1])))


def build_report(
    rpns: Sequence[float],
    drpns: Optional[Sequence[float]],
    most: Optional[Sequence[int]],
    names: Sequence[str],
    node_ids: Optional[Sequence[int]] = None,
) -> DecisionTable:
    """Decision table ordered by node id, plus descending RPN and DRPN rankings.

    ``drpns=None`` marks a non-convergent run: no DRPN values or ranking.
    """
    n = len(rpns)
    ids = list(node_ids) if node_ids is not None else list(range(1, n + 1))
    if len(names) != n or len(ids) != n:
        raise ArityError("rpns, names and node ids must have equal length")
    if drpns is not None and len(drpns) != n:
        raise ArityError("drpns must have one value per node")
    if most is not None and len(most) != n:
        raise ArityError("most-impacted must have one entry per node")
    rows = []
    for k in sorted(range(n), key=lambda k: ids[k]):
        rows.append(
            DecisionRow(
                ids[k],
                names[k],
                float(rpns[k]),
                None if drpns is None else float(drpns[k]),
                None if most is None else most[k],
            )
        )
    drpn_rank = () if drpns is None else _ranking(ids, drpns)
    return DecisionTable(tuple(rows), _ranking(ids, rpns), drpn_rank)
