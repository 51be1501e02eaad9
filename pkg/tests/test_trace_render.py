import pytest

from errors import UsageError
from numeric_engine import build_trace
from trace_render import evaluate_expression, evaluate_rendered, render_step, render_trace


def test_first_step_braces_every_parcel():
    assert render_step(build_trace(3), 0) == "{p(0)} + {p(1)} + {p(2)}"


def test_small_trace():
    assert render_trace(build_trace(3)) == (
        "p(3) = {p(0)} + {p(1)} + {p(2)}\n"
        "     = p(0) + p(1) + [p(2) - {p(0)}]\n"
        "     = p(0) + p(1) + [p(2) - p(0)]\n"
        "     = 3"
    )


def test_zero_and_one():
    assert render_trace(build_trace(0)) == "p(0) = 1"
    assert render_trace(build_trace(1)) == "p(1) = {p(0)}\n     = p(0)\n     = 1"


def test_full_trace_of_ten_contains_nested_cell():
    doc = build_trace(10)
    final = render_step(doc, doc.depth())
    assert "{" not in final
    assert "[p(7) - p(0) - p(1) - p(2) - p(3) - [p(4) - p(0)]]" in final
    assert final.startswith("p(0) + p(1) + p(2) + p(3) + p(4) + p(5) + [p(6) - p(0) - p(1)]")
    assert render_trace(doc).splitlines()[-1].strip() == "= 42"


@pytest.mark.parametrize("n,variant,ending", [
    (10, "two", "+ 10/2 + 1"),
    (11, "two", "+ (11-1)/2 + 1"),
    (10, "one", "+ 1"),
])
def test_tail_rendering(n, variant, ending):
    doc = build_trace(n, variant)
    assert render_step(doc, doc.depth()).endswith(ending)


@pytest.mark.parametrize("variant", ["none", "one", "two"])
def test_rendered_text_reevaluates_to_total(variant, table40):
    doc = build_trace(10, variant)
    values = evaluate_rendered(render_trace(doc), table40)
    assert len(values) == doc.depth() + 2
    assert values[-2] == 42
    assert values[-1] == 42


def test_rendering_is_deterministic():
    assert render_trace(build_trace(12, "one")) == render_trace(build_trace(12, "one"))


def test_evaluate_expression(table40):
    assert evaluate_expression("[p(6) - p(0) - p(1)]", table40) == 9
    assert evaluate_expression("(11-1)/2 + 1", table40) == 6
    with pytest.raises(UsageError):
        evaluate_expression("__import__('os')", table40)


TRACE_OF_TEN = "\n".join([
    "p(10) = {p(0)} + {p(1)} + {p(2)} + {p(3)} + {p(4)} + {p(5)} + {p(6)} + {p(7)}"
    " + {p(8)} + {p(9)}",
    "      = p(0) + p(1) + p(2) + p(3) + p(4) + p(5) + [p(6) - {p(0)} - {p(1)}]"
    " + [p(7) - {p(0)} - {p(1)} - {p(2)} - {p(3)}]"
    " + [p(8) - {p(0)} - {p(1)} - {p(2)} - {p(3)} - {p(4)} - {p(5)}]"
    " + [p(9) - {p(0)} - {p(1)} - {p(2)} - {p(3)} - {p(4)} - {p(5)} - {p(6)} - {p(7)}]",
    "      = p(0) + p(1) + p(2) + p(3) + p(4) + p(5) + [p(6) - p(0) - p(1)]"
    " + [p(7) - p(0) - p(1) - p(2) - p(3)]"
    " + [p(8) - p(0) - p(1) - p(2) - p(3) - p(4) - [p(5) - {p(0)} - {p(1)}]]"
    " + [p(9) - p(0) - p(1) - p(2) - p(3) - p(4) - [p(5) - {p(0)}]"
    " - [p(6) - {p(0)} - {p(1)} - {p(2)}] - [p(7) - {p(0)} - {p(1)} - {p(2)} - {p(3)} - {p(4)}]]",
    "      = p(0) + p(1) + p(2) + p(3) + p(4) + p(5) + [p(6) - p(0) - p(1)]"
    " + [p(7) - p(0) - p(1) - p(2) - p(3)]"
    " + [p(8) - p(0) - p(1) - p(2) - p(3) - p(4) - [p(5) - p(0) - p(1)]]"
    " + [p(9) - p(0) - p(1) - p(2) - p(3) - p(4) - [p(5) - p(0)]"
    " - [p(6) - p(0) - p(1) - p(2)] - [p(7) - p(0) - p(1) - p(2) - p(3) - [p(4) - {p(0)}]]]",
    "      = p(0) + p(1) + p(2) + p(3) + p(4) + p(5) + [p(6) - p(0) - p(1)]"
    " + [p(7) - p(0) - p(1) - p(2) - p(3)]"
    " + [p(8) - p(0) - p(1) - p(2) - p(3) - p(4) - [p(5) - p(0) - p(1)]]"
    " + [p(9) - p(0) - p(1) - p(2) - p(3) - p(4) - [p(5) - p(0)]"
    " - [p(6) - p(0) - p(1) - p(2)] - [p(7) - p(0) - p(1) - p(2) - p(3) - [p(4) - p(0)]]]",
    "      = 42",
])


def _unwrap(text):
    lines = []
    for line in text.splitlines():
        if line.startswith(" " * 8):
            lines[-1] += " " + line.strip()
        else:
            lines.append(line)
    return "\n".join(lines)


def test_full_trace_of_ten():
    doc = build_trace(10)
    assert render_trace(doc, width=10_000) == TRACE_OF_TEN
    wrapped = render_trace(doc)
    assert all(len(line) <= 78 for line in wrapped.splitlines())
    assert _unwrap(wrapped) == TRACE_OF_TEN
