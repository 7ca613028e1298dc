"""Plain-text outputs: trace CSV and the aligned decision report."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .analysis import DecisionTable, FmeaEntry
from .engine import SimulationTrace


def fmt(x: float) -> str:
    """Six significant digits, no trailing zeros."""
    s = f"{float(x):.6g}"
    return "0" if s == "-0" else s


def emit_trace_csv(trace: SimulationTrace, names: Optional[Sequence[str]] = None) -> str:
    """``time,<names...>`` header then one row per step."""
    names = list(names) if names is not None else list(trace.names)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time", *names])
    for t, row in zip(trace.times, trace.values):
        w.writerow([fmt(t), *(fmt(v) for v in row)])
    return buf.getvalue()


def parse_trace_csv(text: str) -> Tuple[List[str], np.ndarray, np.ndarray]:
    """Inverse of :func:`emit_trace_csv`: ``(names, times, values)``."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or not rows[0] or rows[0][0] != "time":
        raise ValueError("trace CSV must start with a 'time,...' header")
    names = rows[0][1:]
    body = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    if body.size == 0:
        return names, np.zeros(0), np.zeros((0, len(names)))
    return names, body[:, 0], body[:, 1:]


@dataclass(frozen=True)
class DelayComparison:
    """Steady values with and without arc delays; ``None`` marks non-convergence."""

    labels: Tuple[str, ...]
    with_delay: Optional[Tuple[float, ...]]
    without_delay: Optional[Tuple[float, ...]]


def _table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> List[str]:
    widths = [len(h) for h in headers]
    for r in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, r)]

    def line(cells):
        return " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    rule = "-+-".join("-" * w for w in widths)
    return [line(headers), rule, *(line(r) for r in rows)]


def render_plts(labels: Sequence[str], plts: Sequence[Optional[Sequence]], rpns: Sequence[float]) -> str:
    """Per-node opinion PLTs, aggregated PLT and RPN (the ``init`` listing).

    ``plts[k]`` is ``(C_O, C_S, C_D, aggregate)`` or None for a node whose
    initial value was given directly.
    """
    out = []
    for label, entry, rpn in zip(labels, plts, rpns):
        if entry is None:
            out += [f"{label}:", f"  initial value (direct) = {fmt(rpn)}"]
            continue
        o, s, d, agg = entry
        out += [
            f"{label}:",
            f"  C_O = {o}",
            f"  C_S = {s}",
            f"  C_D = {d}",
            f"  RPN = {agg}",
            f"  RPN (defuzzified) = {fmt(rpn)}",
        ]
    return "\n".join(out) + "\n"


def render_decision_block(table: DecisionTable, labels: Mapping[int, str]) -> List[str]:
    lab = _labeller(labels)
    rows = []
    for r in table.rows:
        drpn = "non-convergent" if r.drpn is None else fmt(r.drpn)
        rows.append([lab(r.node_id), r.name, fmt(r.rpn), drpn, lab(r.most_impacted)])
    lines = ["Design risk analysis", ""]
    lines += _table(["No.", "Design risk name", "RPN", "DRPN", "Most impact"], rows)
    lines.append("")
    lines.append("RPN ranking:  " + " > ".join(lab(i) for i in table.rpn_ranking))
    if table.drpn_ranking:
        lines.append("DRPN ranking: " + " > ".join(lab(i) for i in table.drpn_ranking))
    else:
        lines.append("DRPN ranking: non-convergent")
    return lines


def render_fmea_block(
    entries: Sequence[FmeaEntry],
    groups: Mapping[str, float],
    labels: Mapping[int, str],
    names: Mapping[int, str],
) -> List[str]:
    """FMEA hazard table and product hazard indices; empty when there are no entries."""
    if not entries:
        return []
    lab = _labeller(labels)
    rows = [
        [lab(e.node_id), e.group, names.get(e.node_id, ""), fmt(e.o), fmt(e.s), fmt(e.d), fmt(e.drh), fmt(e.drh_star)]
        for e in entries
    ]
    lines = ["FMEA hazard indices", ""]
    lines += _table(["No.", "Function", "Design risk name", "O", "S", "D", "DRH", "DRH*"], rows)
    lines += ["", "Product hazard index", ""]
    lines += _table(["Function", "PH"], [[g, fmt(v)] for g, v in groups.items()])
    return lines


def render_comparison_block(comparison: DelayComparison) -> List[str]:
    rows = []
    for k, label in enumerate(comparison.labels):
        a = "non-convergent" if comparison.with_delay is None else fmt(comparison.with_delay[k])
        b = "non-convergent" if comparison.without_delay is None else fmt(comparison.without_delay[k])
        rows.append([label, a, b])
    lines = ["Steady state with and without time delays", ""]
    return lines + _table(["No.", "With time delays", "Without time delays"], rows)


def _labeller(labels: Mapping[int, str]):
    return lambda i: "-" if i is None else labels.get(i, f"C{i}")


def join_blocks(*blocks: Sequence[str]) -> str:
    parts = ["\n".join(b) for b in blocks if b]
    return "\n\n".join(parts) + "\n" if parts else ""


def render_report(
    table: DecisionTable,
    labels: Mapping[int, str],
    fmea: Optional[Tuple[Sequence[FmeaEntry], Mapping[str, float]]] = None,
    comparison: Optional[DelayComparison] = None,
) -> str:
    """Decision table and rankings, then the optional FMEA and delay blocks."""
    names = {r.node_id: r.name for r in table.rows}
    fmea_lines = render_fmea_block(fmea[0], fmea[1], labels, names) if fmea else []
    comp_lines = render_comparison_block(comparison) if comparison is not None else []
    return join_blocks(render_decision_block(table, labels), fmea_lines, comp_lines)
