"""Model documents: a YAML file format with line-numbered diagnostics.

Grammar (all sections except ``nodes`` are optional)::

    scale: 2                      # half range t of the linguistic scale
    weights:                      # required when any node carries tallies
      occurrence: 0.5
      severity: 0.35
      detection: 0.15
    simulation:
      step: 2                     # minutes, default 1
      horizon: 50                 # minutes, default 10
    nodes:
      - id: 1                     # unique integer
        label: DR1                # short code, default "C<id>"
        name: Inlet valve failure
        value: -0.1118            # direct initial value ...
        tallies:                  # ... or expert head-counts, never both
          occurrence: [3, 5, 10, 1, 1]
          severity: [0, 2, 9, 6, 3]
          detection: [0, 2, 6, 7, 5]
    arcs:
      - {source: 1, target: 2, weight: 0.8, delay: 2}
    fmea:
      groups:
        - {name: Fuel supply, members: [1, 2, 4]}
      influences:                 # default: the model's incoming arcs
        - {node: 1, sources: [{node: 2, weight: 0.6}]}

:func:`serialize_model` writes the canonical form of a document; parsing
that text gives back an equal document, and serialising again reproduces
the same bytes.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import yaml

from .engine import SimulationConfig, ThresholdSpec
from .errors import InvalidTallyError, InvalidWeightsError, ModelFileError, OutOfScaleError
from .linguistic import (
    PLT,
    ExpertTally,
    LinguisticScale,
    RiskIndexWeights,
    compute_rpn,
    plt_defuzzify,
    rpn_plt,
    tally_to_plt,
)
from .model import CausalArc, RiskModel, RiskNode, validate_model

INDEX_KEYS = ("occurrence", "severity", "detection")
_NON_PRINTABLE = yaml.reader.Reader.NON_PRINTABLE
# Exponent forms without a mantissa dot, which YAML 1.1 leaves as strings.
_EXP_NUMBER = re.compile(r"[-+]?\d+[eE][-+]?\d+")


@dataclass(frozen=True)
class ModelFileIssue:
    line: Optional[int]
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}" if self.line else self.message


@dataclass(frozen=True)
class NodeSpec:
    id: int
    name: str
    label: str
    value: Optional[float] = None
    tallies: Optional[Tuple[ExpertTally, ExpertTally, ExpertTally]] = None


@dataclass(frozen=True)
class ModelDocument:
    nodes: Tuple[NodeSpec, ...]
    arcs: Tuple[CausalArc, ...] = ()
    scale: LinguisticScale = field(default_factory=LinguisticScale)
    weights: Optional[RiskIndexWeights] = None
    step: float = 1.0
    horizon: float = 10.0
    fmea_groups: Tuple[Tuple[str, Tuple[int, ...]], ...] = ()
    fmea_influences: Optional[Tuple[Tuple[int, Tuple[Tuple[int, float], ...]], ...]] = None

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(n.label for n in self.nodes)

    def opinion_plts(self, node: NodeSpec) -> Tuple[PLT, PLT, PLT]:
        return tuple(tally_to_plt(t, self.scale) for t in node.tallies)

    def rpn_plt(self, node: NodeSpec) -> PLT:
        return rpn_plt(*node.tallies, self.weights, self.scale)

    def initial_values(self) -> List[float]:
        """Direct values, or the defuzzified RPN of each node's tallies."""
        return [
            n.value if n.tallies is None else compute_rpn(*n.tallies, self.weights, self.scale)
            for n in self.nodes
        ]

    def to_model(self) -> RiskModel:
        nodes = tuple(
            RiskNode(n.id, n.name, v) for n, v in zip(self.nodes, self.initial_values())
        )
        return RiskModel(nodes, self.arcs)

    def config(self, threshold: ThresholdSpec = "sigmoid", step=None, horizon=None) -> SimulationConfig:
        return SimulationConfig(
            self.step if step is None else step,
            self.horizon if horizon is None else horizon,
            threshold,
        )

    def fmea_inputs(self):
        """``(entries, influences)`` ready for :func:`analysis.fmea_hazards`."""
        by_id = {n.id: n for n in self.nodes}
        entries = []
        for group, members in self.fmea_groups:
            for node_id in members:
                node = by_id[node_id]
                if node.tallies is None:
                    raise InvalidTallyError(f"FMEA member {node.label} has no expert tallies")
                o, s, d = (plt_defuzzify(tally_to_plt(t, self.scale)) for t in node.tallies)
                entries.append((node_id, group, o, s, d))
        if self.fmea_influences is not None:
            influences = {node: list(srcs) for node, srcs in self.fmea_influences}
        else:
            influences = {}
            for arc in sorted(self.arcs, key=lambda a: (a.target, a.source)):
                influences.setdefault(arc.target, []).append((arc.source, arc.weight))
        return entries, influences


# -- Parsing -----------------------------------------------------------------

class _Map(dict):
    line: int = 0
    key_lines: Dict[str, int]


class _Seq(list):
    line: int = 0
    item_lines: List[int]


def _plain(loader: yaml.SafeLoader, node: yaml.Node) -> Any:
    if isinstance(node, yaml.MappingNode):
        out = _Map()
        out.line = node.start_mark.line + 1
        out.key_lines = {}
        for k, v in node.value:
            key = loader.construct_object(k, deep=True)
            out[key] = _plain(loader, v)
            out.key_lines[key] = k.start_mark.line + 1
        return out
    if isinstance(node, yaml.SequenceNode):
        seq = _Seq(_plain(loader, v) for v in node.value)
        seq.line = node.start_mark.line + 1
        seq.item_lines = [v.start_mark.line + 1 for v in node.value]
        return seq
    return loader.construct_object(node, deep=True)


class _Reader:
    def __init__(self) -> None:
        self.issues: List[ModelFileIssue] = []

    def error(self, line: Optional[int], message: str) -> None:
        self.issues.append(ModelFileIssue(line, message))

    def mapping(self, value, line, what) -> Optional[_Map]:
        if not isinstance(value, dict):
            self.error(line, f"{what} must be a mapping")
            return None
        return value

    def sequence(self, value, line, what) -> Optional[_Seq]:
        if not isinstance(value, list):
            self.error(line, f"{what} must be a list")
            return None
        return value

    def integer(self, value, line, what) -> Optional[int]:
        if isinstance(value, bool) or not isinstance(value, int):
            self.error(line, f"{what} must be an integer, got {value!r}")
            return None
        return value

    def number(self, value, line, what) -> Optional[float]:
        if isinstance(value, str) and _EXP_NUMBER.fullmatch(value.strip()):
            value = float(value)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            self.error(line, f"{what} must be a finite number, got {value!r}")
            return None
        return float(value)

    def text(self, value, line, what) -> Optional[str]:
        if not isinstance(value, str):
            self.error(line, f"{what} must be text, got {value!r}")
            return None
        return value

    def unknown_keys(self, m: _Map, allowed: Sequence[str], what: str) -> None:
        for key in m:
            if key not in allowed:
                self.error(m.key_lines.get(key, m.line), f"unknown key {key!r} in {what}")


def _line(m: _Map, key: str) -> int:
    return m.key_lines.get(key, m.line)


def parse_model_file(text: str) -> ModelDocument:
    """Parse and validate a model document; raise :class:`ModelFileError` listing every issue."""
    loader = None
    try:
        loader = yaml.SafeLoader(text)
        root_node = loader.get_single_node()
        root = _plain(loader, root_node) if root_node is not None else None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ModelFileError([ModelFileIssue(mark.line + 1 if mark else None, f"syntax error: {problem}")]) from None
    finally:
        if loader is not None:
            loader.dispose()

    r = _Reader()
    if not isinstance(root, dict):
        raise ModelFileError([ModelFileIssue(1, "model file must be a mapping of sections")])
    r.unknown_keys(root, ("scale", "weights", "simulation", "nodes", "arcs", "fmea"), "model")

    scale = LinguisticScale()
    if "scale" in root:
        t = r.integer(root["scale"], _line(root, "scale"), "scale")
        if t is not None:
            try:
                scale = LinguisticScale(t)
            except OutOfScaleError as exc:
                r.error(_line(root, "scale"), str(exc))

    weights = None
    if "weights" in root:
        wm = r.mapping(root["weights"], _line(root, "weights"), "weights")
        if wm is not None:
            r.unknown_keys(wm, INDEX_KEYS, "weights")
            ws = []
            for key in INDEX_KEYS:
                if key not in wm:
                    r.error(wm.line, f"weights: missing {key!r}")
                else:
                    ws.append(r.number(wm[key], _line(wm, key), f"weights.{key}"))
            if len(ws) == 3 and None not in ws:
                try:
                    weights = RiskIndexWeights(*ws)
                except InvalidWeightsError as exc:
                    r.error(wm.line, str(exc))

    step, horizon = 1.0, 10.0
    if "simulation" in root:
        sm = r.mapping(root["simulation"], _line(root, "simulation"), "simulation")
        if sm is not None:
            r.unknown_keys(sm, ("step", "horizon"), "simulation")
            if "step" in sm:
                step = r.number(sm["step"], _line(sm, "step"), "simulation.step")
            if "horizon" in sm:
                horizon = r.number(sm["horizon"], _line(sm, "horizon"), "simulation.horizon")
            if step is not None and horizon is not None:
                try:
                    SimulationConfig(step, horizon)
                except ValueError as exc:
                    r.error(sm.line, str(exc))
                    step = None

    nodes = _parse_nodes(r, root, scale)
    if any(n.tallies is not None for n in nodes) and weights is None and "weights" not in root:
        r.error(1, "weights are required when nodes carry tallies")

    arcs, arc_lines = _parse_arcs(r, root)
    groups, influences = _parse_fmea(r, root, {n.id for n in nodes})

    if r.issues:
        raise ModelFileError(r.issues)

    doc = ModelDocument(
        nodes=tuple(sorted(nodes, key=lambda n: n.id)),
        arcs=tuple(arcs),
        scale=scale,
        weights=weights,
        step=step,
        horizon=horizon,
        fmea_groups=groups,
        fmea_influences=influences,
    )
    structural = RiskModel(tuple(RiskNode(n.id, n.name) for n in nodes), doc.arcs)
    for v in validate_model(structural, step):
        line = arc_lines[arcs.index(v.arc)] if v.arc is not None else _line(root, "nodes")
        r.error(line, v.message)
    if r.issues:
        raise ModelFileError(r.issues)
    return doc


def _parse_nodes(r: _Reader, root: _Map, scale: LinguisticScale) -> List[NodeSpec]:
    if root.get("nodes") is None:
        r.error(_line(root, "nodes") if "nodes" in root else 1, "model requires at least one node")
        return []
    seq = r.sequence(root["nodes"], _line(root, "nodes"), "nodes")
    if seq is None:
        return []
    if not seq:
        r.error(_line(root, "nodes"), "model requires at least one node")
    nodes = []
    seen = set()
    for item, line in zip(seq, seq.item_lines):
        m = r.mapping(item, line, "node")
        if m is None:
            continue
        r.unknown_keys(m, ("id", "label", "name", "value", "tallies"), "node")
        node_id = r.integer(m.get("id"), _line(m, "id"), "node id") if "id" in m else None
        if "id" not in m:
            r.error(line, "node is missing 'id'")
        if node_id is not None:
            if node_id in seen:
                r.error(_line(m, "id"), f"duplicate node id {node_id}")
            seen.add(node_id)
        name = r.text(m.get("name", ""), _line(m, "name"), "node name")
        label = r.text(m.get("label", f"C{node_id}"), _line(m, "label"), "node label")
        has_value, has_tallies = "value" in m, "tallies" in m
        value = tallies = None
        if has_value and has_tallies:
            r.error(line, f"node {node_id}: ambiguous initialization (both value and tallies)")
        elif not has_value and not has_tallies:
            r.error(line, f"node {node_id}: needs either a value or tallies")
        elif has_value:
            value = r.number(m["value"], _line(m, "value"), "node value")
        else:
            tallies = _parse_tallies(r, m["tallies"], _line(m, "tallies"), scale)
        if node_id is not None and name is not None and label is not None:
            nodes.append(NodeSpec(node_id, name, label, value, tallies))
    return nodes


def _parse_tallies(r: _Reader, value, line, scale):
    m = r.mapping(value, line, "tallies")
    if m is None:
        return None
    r.unknown_keys(m, INDEX_KEYS, "tallies")
    out = []
    for key in INDEX_KEYS:
        if key not in m:
            r.error(m.line, f"tallies: missing {key!r}")
            continue
        seq = r.sequence(m[key], _line(m, key), f"tallies.{key}")
        if seq is None:
            continue
        counts = [r.integer(c, _line(m, key), f"tallies.{key} count") for c in seq]
        if None in counts:
            continue
        if len(counts) != scale.size:
            r.error(_line(m, key), f"tallies.{key} needs {scale.size} counts, got {len(counts)}")
            continue
        try:
            out.append(ExpertTally(tuple(counts)))
        except InvalidTallyError as exc:
            r.error(_line(m, key), f"tallies.{key}: {exc}")
    return tuple(out) if len(out) == 3 else None


def _parse_arcs(r: _Reader, root: _Map):
    arcs: List[CausalArc] = []
    lines: List[int] = []
    if "arcs" not in root or root["arcs"] is None:
        return arcs, lines
    seq = r.sequence(root["arcs"], _line(root, "arcs"), "arcs")
    for item, line in zip(seq or [], (seq.item_lines if seq else [])):
        m = r.mapping(item, line, "arc")
        if m is None:
            continue
        r.unknown_keys(m, ("source", "target", "weight", "delay"), "arc")
        missing = [k for k in ("source", "target", "weight", "delay") if k not in m]
        if missing:
            r.error(line, f"arc is missing {', '.join(missing)}")
            continue
        src = r.integer(m["source"], _line(m, "source"), "arc source")
        dst = r.integer(m["target"], _line(m, "target"), "arc target")
        w = r.number(m["weight"], _line(m, "weight"), "arc weight")
        d = r.number(m["delay"], _line(m, "delay"), "arc delay")
        if None not in (src, dst, w, d):
            arcs.append(CausalArc(src, dst, w, d))
            lines.append(line)
    return arcs, lines


def _parse_fmea(r: _Reader, root: _Map, ids):
    if "fmea" not in root:
        return (), None
    m = r.mapping(root["fmea"], _line(root, "fmea"), "fmea")
    if m is None:
        return (), None
    r.unknown_keys(m, ("groups", "influences"), "fmea")
    groups = []
    seq = r.sequence(m.get("groups", []), _line(m, "groups"), "fmea.groups") or []
    for item, line in zip(seq, getattr(seq, "item_lines", [])):
        g = r.mapping(item, line, "fmea group")
        if g is None:
            continue
        name = r.text(g.get("name"), _line(g, "name"), "fmea group name")
        members = r.sequence(g.get("members"), _line(g, "members"), "fmea group members")
        if name is None or members is None:
            continue
        good = []
        for member in members:
            mid = r.integer(member, _line(g, "members"), "fmea member")
            if mid is not None and mid not in ids:
                r.error(_line(g, "members"), f"fmea group {name!r}: unknown node {mid}")
            elif mid is not None:
                good.append(mid)
        groups.append((name, tuple(good)))

    influences = None
    if "influences" in m:
        influences = []
        seq = r.sequence(m["influences"], _line(m, "influences"), "fmea.influences") or []
        for item, line in zip(seq, getattr(seq, "item_lines", [])):
            e = r.mapping(item, line, "fmea influence")
            if e is None:
                continue
            node = r.integer(e.get("node"), _line(e, "node"), "influence node")
            if node is not None and node not in ids:
                r.error(_line(e, "node"), f"influence for unknown node {node}")
            sources = []
            for s in r.sequence(e.get("sources", []), _line(e, "sources"), "influence sources") or []:
                sm = r.mapping(s, _line(e, "sources"), "influence source")
                if sm is None:
                    continue
                sid = r.integer(sm.get("node"), _line(sm, "node"), "influence source node")
                w = r.number(sm.get("weight"), _line(sm, "weight"), "influence weight")
                if sid is not None and sid not in ids:
                    r.error(_line(sm, "node"), f"unknown influence source {sid}")
                elif sid is not None and w is not None:
                    sources.append((sid, w))
            if node is not None:
                influences.append((node, tuple(sources)))
        influences = tuple(influences)
    return tuple(groups), influences


def load_model_file(path: Union[str, Path]) -> ModelDocument:
    return parse_model_file(Path(path).read_text(encoding="utf-8"))


# -- Canonical serialisation -------------------------------------------------

def _num(x: float) -> str:
    text = repr(float(x))
    if "e" in text and "." not in text:
        # YAML 1.1 reads "1e-12" as a string; "1.0e-12" is a float.
        mantissa, exp = text.split("e")
        text = f"{mantissa}.0e{exp}"
    return text


def _str(s: str) -> str:
    # JSON strings are valid YAML double-quoted scalars; characters YAML
    # refuses to read raw are written as escapes.
    return _NON_PRINTABLE.sub(lambda m: f"\\u{ord(m.group()):04x}", json.dumps(s, ensure_ascii=False))


def serialize_model(doc: ModelDocument) -> str:
    out = [f"scale: {doc.scale.half_range}"]
    if doc.weights is not None:
        out.append("weights:")
        for key, w in zip(INDEX_KEYS, doc.weights.as_tuple()):
            out.append(f"  {key}: {_num(w)}")
    out += ["simulation:", f"  step: {_num(doc.step)}", f"  horizon: {_num(doc.horizon)}", "nodes:"]
    for n in doc.nodes:
        out += [f"  - id: {n.id}", f"    label: {_str(n.label)}", f"    name: {_str(n.name)}"]
        if n.tallies is None:
            out.append(f"    value: {_num(n.value)}")
        else:
            out.append("    tallies:")
            for key, t in zip(INDEX_KEYS, n.tallies):
                out.append(f"      {key}: [{', '.join(str(c) for c in t.counts)}]")
    if doc.arcs:
        out.append("arcs:")
        for a in doc.arcs:
            out.append(
                f"  - {{source: {a.source}, target: {a.target}, "
                f"weight: {_num(a.weight)}, delay: {_num(a.delay)}}}"
            )
    if doc.fmea_groups or doc.fmea_influences is not None:
        out.append("fmea:")
        out.append("  groups:" + ("" if doc.fmea_groups else " []"))
        for name, members in doc.fmea_groups:
            out.append(f"    - {{name: {_str(name)}, members: [{', '.join(str(i) for i in members)}]}}")
        if doc.fmea_influences is not None:
            out.append("  influences:" + ("" if doc.fmea_influences else " []"))
            for node, sources in doc.fmea_influences:
                srcs = ", ".join(f"{{node: {s}, weight: {_num(w)}}}" for s, w in sources)
                out.append(f"    - {{node: {node}, sources: [{srcs}]}}")
    return "\n".join(out) + "\n"
