"""Command-line interface: ``tokenfcm <command> <model-file> [options]``.

Exit status: 0 on success, 1 on parse or validation errors, 2 when a
simulation does not reach a fixed point or limit cycle.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import analysis
from .engine import THRESHOLDS, SimulationConfig, simulate
from .errors import ConfigurationError, ModelFileError, NotConvergedError, TokenFCMError
from .modelfile import ModelDocument, load_model_file
from .model import validate_model
from .reporting import (
    DelayComparison,
    emit_trace_csv,
    join_blocks,
    render_comparison_block,
    render_fmea_block,
    render_plts,
    render_report,
)

EXIT_OK, EXIT_INVALID, EXIT_NOT_CONVERGED = 0, 1, 2


def _global_flags(parser: argparse.ArgumentParser, default) -> None:
    parser.add_argument("--epsilon", type=float, default=default,
                        help=f"steady-state tolerance (default {analysis.DEFAULT_EPSILON})")
    parser.add_argument("--max-period", type=int, default=default,
                        help=f"longest cycle searched, in steps (default {analysis.DEFAULT_MAX_PERIOD})")
    parser.add_argument("--threshold", choices=sorted(THRESHOLDS), default=default,
                        help="squashing function (default sigmoid)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tokenfcm", description="Token-driven FCM risk assessment.")
    _global_flags(parser, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("model", type=Path, help="model file (YAML)")
        _global_flags(p, argparse.SUPPRESS)
        return p

    command("init", "print per-node PLTs and defuzzified RPNs")
    p = command("simulate", "run the token simulation and emit the trace CSV")
    p.add_argument("--step", type=float, help="step size in minutes")
    p.add_argument("--horizon", type=float, help="simulated time in minutes")
    p.add_argument("--trace", type=Path, help="write the CSV here instead of stdout")
    p = command("analyze", "RPN, simulation, DRPN and decision table")
    p.add_argument("--independent", action="store_true", help="run one simulation per node for the most-impact column")
    p.add_argument("--report", type=Path, help="write the report here instead of stdout")
    p = command("compare", "delay/no-delay and FMEA baselines (both when no flag is given)")
    p.add_argument("--no-delay", action="store_true", help="compare against synchronous iteration without delays")
    p.add_argument("--fmea", action="store_true", help="FMEA hazard indices")
    command("validate", "validation report only")
    return parser


def _options(args):
    eps = getattr(args, "epsilon", analysis.DEFAULT_EPSILON)
    maxp = getattr(args, "max_period", analysis.DEFAULT_MAX_PERIOD)
    thr = getattr(args, "threshold", "sigmoid")
    if not eps > 0:
        raise ConfigurationError("--epsilon must be positive")
    if maxp < 1:
        raise ConfigurationError("--max-period must be at least 1")
    return eps, maxp, thr


def _steady(trace, eps, maxp):
    status = analysis.detect_steady_state(trace, eps, analysis.effective_max_period(len(trace), maxp))
    return status, (analysis.compute_drpn(trace, status) if status.converged else None)


def _labels(doc: ModelDocument):
    return {n.id: n.label for n in doc.nodes}


def cmd_init(doc: ModelDocument, args, out) -> int:
    plts = []
    for n in doc.nodes:
        plts.append(None if n.tallies is None else (*doc.opinion_plts(n), doc.rpn_plt(n)))
    out.write(render_plts(doc.labels, plts, doc.initial_values()))
    return EXIT_OK


def cmd_simulate(doc: ModelDocument, args, out) -> int:
    _, _, thr = _options(args)
    config = doc.config(thr, args.step, args.horizon)
    model = doc.to_model()
    violations = validate_model(model, config.step)
    if violations:
        for v in violations:
            sys.stderr.write(f"error: {v.message}\n")
        return EXIT_INVALID
    text = emit_trace_csv(simulate(model, None, config), doc.labels)
    if args.trace:
        args.trace.write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def run_analysis(doc: ModelDocument, config: SimulationConfig, eps: float, maxp: int,
                 independent: bool, executor=None):
    """Decision table for ``doc``; second value is False if any run did not converge."""
    model = doc.to_model()
    rpns = list(model.initial_values)
    _, drpn = _steady(simulate(model, rpns, config), eps, maxp)
    converged = drpn is not None
    most = None
    if independent:
        try:
            matrix = analysis.impact_matrix(model, rpns, config, eps, maxp, executor=executor)
            most = analysis.most_impacted(matrix, model.node_ids)
        except NotConvergedError:
            converged = False
    table = analysis.build_report(rpns, drpn, most, model.names, model.node_ids)
    return table, converged


def cmd_analyze(doc: ModelDocument, args, out) -> int:
    eps, maxp, thr = _options(args)
    table, converged = run_analysis(doc, doc.config(thr), eps, maxp, args.independent)
    text = render_report(table, _labels(doc))
    if not converged:
        text += "\nwarning: simulation did not converge; extend the horizon\n"
    if args.report:
        args.report.write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def delay_comparison(doc: ModelDocument, config: SimulationConfig, eps: float, maxp: int) -> DelayComparison:
    model = doc.to_model()
    _, with_delay = _steady(simulate(model, None, config), eps, maxp)
    _, without = _steady(analysis.classic_fcm_iterate(model, None, config), eps, maxp)
    return DelayComparison(
        doc.labels,
        None if with_delay is None else tuple(with_delay),
        None if without is None else tuple(without),
    )


def cmd_compare(doc: ModelDocument, args, out) -> int:
    eps, maxp, thr = _options(args)
    both = not (args.no_delay or args.fmea)
    blocks: List[List[str]] = []
    code = EXIT_OK
    if args.no_delay or both:
        comp = delay_comparison(doc, doc.config(thr), eps, maxp)
        blocks.append(render_comparison_block(comp))
        if comp.with_delay is None or comp.without_delay is None:
            code = EXIT_NOT_CONVERGED
    if args.fmea or both:
        entries, influences = doc.fmea_inputs()
        rows, groups = analysis.fmea_hazards(entries, influences)
        blocks.append(render_fmea_block(rows, groups, _labels(doc), {n.id: n.name for n in doc.nodes}))
    out.write(join_blocks(*blocks))
    return code


def cmd_validate(doc: ModelDocument, args, out) -> int:
    # Parsing already ran the structural checks; reaching here means no violations.
    out.write(f"ok: {len(doc.nodes)} nodes, {len(doc.arcs)} arcs, step {doc.step:g} min\n")
    return EXIT_OK


COMMANDS = {
    "init": cmd_init,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "compare": cmd_compare,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        doc = load_model_file(args.model)
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except ModelFileError as exc:
        for issue in exc.issues:
            sys.stderr.write(f"{args.model}: {issue}\n")
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](doc, args, out)
    except NotConvergedError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NOT_CONVERGED
    except TokenFCMError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
