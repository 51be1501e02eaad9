"""
Trace Rendering Module
Renders a TraceDocument in brace/bracket notation, one line per zoom step,
and re-evaluates rendered text with exact arithmetic.

Step 0 shows every top parcel as {p(k)}. Each following step examines one
more generation: examined leaves lose their braces, examined cells become
[p(k) - child - ...] with their freshly generated children in braces. The
last expansion line is brace-free and is followed by "= total".
"""
import ast
import re
import textwrap
from fractions import Fraction

from errors import UsageError

# Continuation lines are wrapped at this column
RENDER_WIDTH = 78

_TERM = re.compile(r"p\((\d+)\)")


def _render_node(node, depth, step):
    if depth > step:
        return f"{{p({node.tab})}}"
    if not node.children:
        return f"p({node.tab})"
    inner = " - ".join(_render_node(child, depth + 1, step) for child in node.children)
    return f"[p({node.tab}) - {inner}]"


def _render_tail(n, description, value):
    if description == "⌊n/2⌋":
        return f"{n}/2" if n % 2 == 0 else f"({n}-1)/2"
    return str(value)


def render_step(doc, step):
    """The expression of p(n) after `step` generations have been examined"""
    pieces = [_render_node(child, 1, step) for child in doc.children]
    pieces.extend(_render_tail(doc.n, description, value) for description, value in doc.tail_terms)
    return " + ".join(pieces)


def render_trace(doc, width=RENDER_WIDTH):
    """
    Render every zoom step of a trace followed by its total

    Args:
        doc (TraceDocument): The expansion to render
        width (int): Column at which long lines wrap

    Returns:
        str: Deterministic multi-line text ending in "= <total>"
    """
    lhs = f"p({doc.n})"
    if doc.n == 0:
        return f"{lhs} = {doc.total}"
    pad = " " * (len(lhs) + 1)
    logical = [f"{lhs} = {render_step(doc, 0)}"]
    logical.extend(f"{pad}= {render_step(doc, step)}" for step in range(1, doc.depth() + 1))
    logical.append(f"{pad}= {doc.total}")
    # Wrap each logical line on its own; continuation lines indent past the "="
    lines = []
    for line in logical:
        lines.append(textwrap.fill(line, width=width, subsequent_indent=pad + "  ",
                                   break_long_words=False, break_on_hyphens=False))
    return "\n".join(lines)


def _evaluate_node(node):
    if isinstance(node, ast.Expression):
        return _evaluate_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _evaluate_node(node.operand)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp):
        left, right = _evaluate_node(node.left), _evaluate_node(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return left / right
    raise UsageError(f"unsupported element in rendered expression: {ast.dump(node)}")


def evaluate_expression(expression, table):
    """Evaluate one rendered expression, substituting oracle values for p(k)"""
    # Substitute values, then read braces and brackets as parentheses
    arithmetic = _TERM.sub(lambda match: str(table[int(match.group(1))]), expression)
    arithmetic = arithmetic.translate(str.maketrans("{[}]", "(())"))
    try:
        tree = ast.parse(arithmetic.strip(), mode="eval")
    except SyntaxError as e:
        raise UsageError(f"cannot parse rendered expression: {str(e)}")
    return _evaluate_node(tree)


def evaluate_rendered(text, table):
    """
    Values of every right-hand side in a rendered trace

    A braced parcel is read at its raw value p(k), so only the last
    expansion line, where every parcel has been examined, equals the total.

    Returns:
        list: One Fraction per "=" segment, in order
    """
    joined = " ".join(line.strip() for line in text.splitlines())
    segments = joined.split("=")
    return [evaluate_expression(segment, table) for segment in segments[1:]]
