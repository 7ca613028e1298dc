"""Fixed-step token scheduler for time-delayed fuzzy cognitive maps.

Every simulation step runs four phases in a fixed order:

1. each node activated during the previous step (every node, or the
   caller-chosen token holders, at the first step) emits one fresh token per
   outgoing arc, carrying a snapshot of its current value, and is deactivated;
2. every in-flight token has its remaining delay reduced by one step; tokens
   reaching zero arrive and activate their target;
3. every activated node folds all tokens that arrived this step into a single
   update ``f(value + sum(weight * snapshot))``;
4. the clock advances by one step.

Tokens arriving at a node without outgoing arcs are absorbed.  Row 0 of the
trace is the raw initial vector; no threshold is applied to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ArityError, ConfigurationError, InvalidModelError, MissingNodeError, NumericDomainError
from .model import RiskModel, steps_for, validate_model


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def tanh_unit(x: float) -> float:
    return 0.5 * (1.0 + math.tanh(x))


def clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


THRESHOLDS: Dict[str, Callable[[float], float]] = {
    "sigmoid": sigmoid,
    "tanh-unit": tanh_unit,
    "clamp": clamp,
}

ThresholdSpec = Union[str, Callable[[float], float]]


def _resolve(kind: ThresholdSpec) -> Callable[[float], float]:
    if callable(kind):
        return kind
    try:
        return THRESHOLDS[kind]
    except KeyError:
        raise ConfigurationError(
            f"unknown threshold {kind!r}; choose from {sorted(THRESHOLDS)}"
        ) from None


def threshold(x: float, kind: ThresholdSpec = "sigmoid") -> float:
    """Bound ``x`` into the unit interval with the selected squashing function."""
    if not math.isfinite(x):
        raise NumericDomainError(f"threshold input must be finite, got {x}")
    return _resolve(kind)(x)


def net_input(current: float, contributions: Iterable[Tuple[float, float]]) -> float:
    """``current + sum(weight * value)``, correctly rounded.

    ``math.fsum`` makes the result independent of summation order, which is
    what lets the token scheduler and synchronous iteration agree bit for bit.
    """
    return math.fsum([current, *(w * v for w, v in contributions)])


@dataclass(frozen=True)
class Token:
    """Activation record travelling along one arc.

    ``node_value`` is frozen at emission; later changes to the source node
    never reach a token already in flight.
    """

    token_id: int
    node_id: int
    node_value: float
    arc_time_delay: float
    arc_weight: float
    target: int
    remaining_steps: int


@dataclass(frozen=True)
class SimulationConfig:
    step: float = 1.0
    horizon: float = 10.0
    threshold: ThresholdSpec = "sigmoid"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.step) and self.step > 0):
            raise ConfigurationError(f"step must be positive, got {self.step}")
        if not (math.isfinite(self.horizon) and self.horizon >= self.step):
            raise ConfigurationError(f"horizon {self.horizon} must be at least one step ({self.step})")
        if steps_for(self.horizon, self.step) is None:
            raise ConfigurationError(f"horizon {self.horizon} is not a multiple of step {self.step}")
        _resolve(self.threshold)

    @property
    def n_steps(self) -> int:
        return steps_for(self.horizon, self.step)

    @property
    def squash(self) -> Callable[[float], float]:
        return _resolve(self.threshold)


@dataclass(frozen=True)
class SimulationTrace:
    """Node values over time; one row per step, one column per node."""

    times: np.ndarray
    values: np.ndarray
    activations: Tuple[FrozenSet[int], ...]
    node_ids: Tuple[int, ...]
    names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=float)
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape != (len(times), len(self.node_ids)):
            raise ArityError(
                f"values shape {values.shape} does not match {len(times)} times x {len(self.node_ids)} nodes"
            )
        if len(self.activations) != len(times):
            raise ArityError("one activation set per time step required")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"C{i}" for i in self.node_ids))
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.times)

    def column(self, node_id: int) -> np.ndarray:
        try:
            return self.values[:, self.node_ids.index(node_id)]
        except ValueError:
            raise MissingNodeError(f"unknown node id {node_id}") from None

    def at(self, time: float) -> np.ndarray:
        k = int(np.argmin(np.abs(self.times - time)))
        if not math.isclose(self.times[k], time, rel_tol=1e-9, abs_tol=1e-12):
            raise KeyError(f"no row at time {time}")
        return self.values[k]

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]


def activate_update(
    current: float, arrivals: Sequence[Token], kind: ThresholdSpec = "sigmoid"
) -> float:
    """New value of a node activated by ``arrivals`` (all folded together)."""
    if not arrivals:
        raise ArityError("activate_update needs at least one arriving token")
    return threshold(net_input(current, ((t.arc_weight, t.node_value) for t in arrivals)), kind)


class TokenEngine:
    """Step-by-step executor; :func:`simulate` is the usual entry point.

    ``active`` selects which nodes hold a token at the start (default: all).
    """

    def __init__(
        self,
        model: RiskModel,
        initial: Optional[Sequence[float]] = None,
        config: Optional[SimulationConfig] = None,
        active: Optional[Iterable[int]] = None,
    ):
        config = config or SimulationConfig()
        violations = validate_model(model, config.step)
        if violations:
            raise InvalidModelError(violations)
        if initial is None:
            initial = model.initial_values
        if len(initial) != len(model):
            raise ArityError(f"{len(initial)} initial values for {len(model)} nodes")

        self.model = model
        self.config = config
        self._f = config.squash
        self.values = np.array(initial, dtype=float)
        self.step_index = 0
        self._next_token = 1
        self._tokens: List[Token] = []

        self._out: List[List[Tuple[int, float, float, int]]] = [[] for _ in model.nodes]
        for arc in sorted(model.arcs, key=lambda a: (a.source, a.target)):
            self._out[model.position(arc.source)].append(
                (arc.target, arc.weight, arc.delay, steps_for(arc.delay, config.step))
            )
        if active is None:
            self._active = set(range(len(model)))
        else:
            self._active = {model.position(i) for i in active}

    @property
    def time(self) -> float:
        return self.step_index * self.config.step

    @property
    def tokens(self) -> Tuple[Token, ...]:
        """Tokens currently in flight."""
        return tuple(self._tokens)

    @property
    def active(self) -> FrozenSet[int]:
        """Node ids that will emit at the start of the next step."""
        return frozenset(self.model.nodes[p].id for p in self._active)

    def step(self) -> FrozenSet[int]:
        """Advance one step; return ids of the nodes updated in it."""
        ids = self.model.node_ids
        step = self.config.step

        for pos in sorted(self._active):
            for target, weight, delay, ticks in self._out[pos]:
                self._tokens.append(
                    Token(self._next_token, ids[pos], float(self.values[pos]), delay, weight, target, ticks)
                )
                self._next_token += 1
        self._active = set()

        arrived: Dict[int, List[Token]] = {}
        in_flight: List[Token] = []
        for tok in self._tokens:
            left = tok.remaining_steps - 1
            tok = replace(tok, remaining_steps=left, arc_time_delay=left * step)
            if left == 0:
                arrived.setdefault(self.model.position(tok.target), []).append(tok)
            else:
                in_flight.append(tok)
        self._tokens = in_flight

        for pos in sorted(arrived):
            contributions = ((t.arc_weight, t.node_value) for t in arrived[pos])
            x = net_input(float(self.values[pos]), contributions)
            if not math.isfinite(x):
                raise NumericDomainError(f"non-finite net input at node {ids[pos]}")
            self.values[pos] = self._f(x)
            self._active.add(pos)

        self.step_index += 1
        return frozenset(ids[p] for p in sorted(arrived))


def simulate(
    model: RiskModel,
    initial: Optional[Sequence[float]] = None,
    config: Optional[SimulationConfig] = None,
    active: Optional[Iterable[int]] = None,
) -> SimulationTrace:
    """Run the token scheduler from time 0 to exactly ``config.horizon``."""
    engine = TokenEngine(model, initial, config, active)
    config = engine.config
    rows = [engine.values.copy()]
    updated: List[FrozenSet[int]] = [frozenset()]
    for _ in range(config.n_steps):
        updated.append(engine.step())
        rows.append(engine.values.copy())
    times = np.arange(config.n_steps + 1) * config.step
    return SimulationTrace(times, np.vstack(rows), tuple(updated), model.node_ids, model.names)
