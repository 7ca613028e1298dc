import numpy as np
import pytest

from tokenfcm.analysis import build_report, fmea_hazards
from tokenfcm.engine import simulate
from tokenfcm.reporting import (
    DelayComparison,
    emit_trace_csv,
    fmt,
    parse_trace_csv,
    render_comparison_block,
    render_fmea_block,
    render_plts,
    render_report,
)


@pytest.mark.parametrize("x, text", [(-1.339, "-1.339"), (0.0, "0"), (-0.0, "0"), (0.8476578890017034, "0.847658"), (50.0, "50")])
def test_fmt(x, text):
    assert fmt(x) == text


def test_trace_csv_layout(diesel_published_doc):
    model = diesel_published_doc.to_model()
    text = emit_trace_csv(simulate(model, config=diesel_published_doc.config()), diesel_published_doc.labels)
    lines = text.splitlines()
    assert lines[0] == "time,DR1,DR2,DR3,DR4,DR5,DR6"
    assert lines[1] == "0,-0.1118,0.0417,-1.339,-1.5745,-1.3381,-0.8696"
    assert len(lines) == 27 and lines[-1].startswith("50,")


def test_trace_csv_round_trip(diesel_published_doc):
    trace = simulate(diesel_published_doc.to_model(), config=diesel_published_doc.config())
    names, times, values = parse_trace_csv(emit_trace_csv(trace))
    assert names == list(trace.names)
    np.testing.assert_array_equal(times, trace.times)
    np.testing.assert_allclose(values, trace.values, rtol=1e-5, atol=1e-6)


def test_trace_csv_quotes_awkward_names():
    from tokenfcm.model import RiskModel, RiskNode
    from tokenfcm.engine import SimulationConfig
    m = RiskModel((RiskNode(1, 'a,"b"', 0.1),))
    names, _, _ = parse_trace_csv(emit_trace_csv(simulate(m, config=SimulationConfig(1, 2))))
    assert names == ['a,"b"']


def test_parse_rejects_headerless_text():
    with pytest.raises(ValueError):
        parse_trace_csv("1,2,3\n")


LABELS = {1: "DR1", 2: "DR2"}


def test_report_rows_and_rankings():
    table = build_report([0.1, 0.3], [0.7, 0.6], [2, 1], ["valve", "piston"], [1, 2])
    text = render_report(table, LABELS)
    lines = text.splitlines()
    assert lines[0] == "Design risk analysis"
    assert lines[2].split(" | ")[0].strip() == "No."
    row = [c.strip() for c in lines[4].split("|")]
    assert row == ["DR1", "valve", "0.1", "0.7", "DR2"]
    assert "RPN ranking:  DR2 > DR1" in text
    assert "DRPN ranking: DR1 > DR2" in text
    assert "FMEA" not in text and "time delays" not in text


def test_report_marks_non_convergence_and_missing_column():
    table = build_report([0.1, 0.3], None, None, ["valve", "piston"], [1, 2])
    text = render_report(table, LABELS)
    assert "non-convergent" in text
    assert [c.strip() for c in text.splitlines()[4].split("|")][-1] == "-"


def test_report_with_optional_blocks():
    table = build_report([0.1, 0.3], [0.7, 0.6], None, ["valve", "piston"], [1, 2])
    fmea = fmea_hazards([(1, "g", 0.0, 0.0, 0.0), (2, "g", 0.0, 0.0, 0.0)], {2: [(1, 0.5)]})
    comp = DelayComparison(("DR1", "DR2"), (0.7, 0.6), None)
    text = render_report(table, LABELS, fmea, comp)
    assert "FMEA hazard indices" in text and "Product hazard index" in text
    assert text.index("FMEA") < text.index("Steady state with and without")
    assert "| 2.5" in text


def test_empty_fmea_block_omitted():
    assert render_fmea_block([], {}, LABELS, {}) == []


def test_comparison_block_columns():
    lines = render_comparison_block(DelayComparison(("A",), (0.5,), (0.25,)))
    assert [c.strip() for c in lines[-1].split("|")] == ["A", "0.5", "0.25"]


def test_render_plts_direct_value():
    text = render_plts(["DR1"], [None], [-0.1118])
    assert text == "DR1:\n  initial value (direct) = -0.1118\n"
