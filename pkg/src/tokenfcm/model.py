"""Risk-graph data model: nodes, weighted delayed arcs, and validation."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import MissingNodeError

# Relative slack when checking that a delay is a whole number of steps.
_STEP_TOL = 1e-9


@dataclass(frozen=True)
class RiskNode:
    id: int
    name: str = ""
    initial_value: float = 0.0


@dataclass(frozen=True)
class CausalArc:
    """Influence of ``source`` on ``target`` after ``delay`` minutes."""

    source: int
    target: int
    weight: float
    delay: float


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    arc: Optional[CausalArc] = None
    node: Optional[int] = None


@dataclass(frozen=True)
class RiskModel:
    """Directed risk graph.  Nodes are kept sorted by id.

    Construction never rejects a malformed graph; call :func:`validate_model`
    to obtain the list of problems.
    """

    nodes: Tuple[RiskNode, ...]
    arcs: Tuple[CausalArc, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.id)))
        object.__setattr__(self, "arcs", tuple(self.arcs))

    @property
    def node_ids(self) -> Tuple[int, ...]:
        return tuple(n.id for n in self.nodes)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(n.name for n in self.nodes)

    @property
    def initial_values(self) -> Tuple[float, ...]:
        return tuple(n.initial_value for n in self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def position(self, node_id: int) -> int:
        """Column of ``node_id`` in value vectors."""
        for k, n in enumerate(self.nodes):
            if n.id == node_id:
                return k
        raise MissingNodeError(f"unknown node id {node_id}")

    def node(self, node_id: int) -> RiskNode:
        return self.nodes[self.position(node_id)]

    def with_initial(self, values: Sequence[float]) -> "RiskModel":
        if len(values) != len(self.nodes):
            raise ValueError("one value per node required")
        nodes = tuple(
            RiskNode(n.id, n.name, float(v)) for n, v in zip(self.nodes, values)
        )
        return RiskModel(nodes, self.arcs)


def steps_for(delay: float, step: float) -> Optional[int]:
    """Number of whole steps in ``delay``, or None if it is not a multiple."""
    ratio = delay / step
    k = round(ratio)
    if k >= 1 and abs(ratio - k) <= _STEP_TOL * max(1.0, abs(ratio)):
        return int(k)
    return None


def validate_model(model: RiskModel, step: float) -> List[Violation]:
    """Every reason ``model`` cannot be simulated with step ``step``.

    An empty list means the model is simulatable.
    """
    if not (math.isfinite(step) and step > 0):
        raise ValueError(f"step must be positive, got {step}")
    out: List[Violation] = []
    ids = Counter(n.id for n in model.nodes)
    for node_id, count in sorted(ids.items()):
        if count > 1:
            out.append(Violation("duplicate-node", f"node id {node_id} appears {count} times", node=node_id))

    pairs = Counter((a.source, a.target) for a in model.arcs)
    reported = set()
    for a in model.arcs:
        tag = f"arc {a.source}->{a.target}"
        if a.source not in ids or a.target not in ids:
            missing = [x for x in (a.source, a.target) if x not in ids]
            out.append(Violation("dangling-endpoint", f"{tag}: unknown node {missing[0]}", arc=a))
        if a.source == a.target:
            out.append(Violation("self-loop", f"{tag}: self-loops are not allowed", arc=a))
        if pairs[(a.source, a.target)] > 1 and (a.source, a.target) not in reported:
            reported.add((a.source, a.target))
            out.append(Violation("duplicate-arc", f"{tag}: more than one arc for this pair", arc=a))
        if not (math.isfinite(a.weight) and -1.0 <= a.weight <= 1.0):
            out.append(Violation("weight-range", f"{tag}: weight {a.weight} outside [-1, 1]", arc=a))
        if not (math.isfinite(a.delay) and a.delay > 0):
            out.append(Violation("non-positive-delay", f"{tag}: delay {a.delay} must be positive", arc=a))
        elif steps_for(a.delay, step) is None:
            out.append(
                Violation("delay-not-multiple", f"{tag}: delay not multiple of step ({a.delay} vs {step})", arc=a)
            )
    return out


def adjacency(model: RiskModel, node_id: int) -> Tuple[Tuple[CausalArc, ...], Tuple[CausalArc, ...]]:
    """Incoming and outgoing arcs of a node, each sorted by counterpart id."""
    model.position(node_id)
    incoming = sorted((a for a in model.arcs if a.target == node_id), key=lambda a: a.source)
    outgoing = sorted((a for a in model.arcs if a.source == node_id), key=lambda a: a.target)
    return tuple(incoming), tuple(outgoing)
