"""
Helper Functions Module

File formats shared by the CLI and the verification scripts (graph, model,
configuration and tree files, all line-oriented text with `#` comments)
plus the emoji status logger used for diagnostics on stderr.
"""

import sys

from chipfiring.bijection import SpanningTree
from chipfiring.dynamics import Configuration
from chipfiring.model import asm_cover, build_model, cfm_cover, model_name
from chipfiring.multigraph import build_graph


class ParseError(ValueError):
    """Malformed input file; message carries path and line number."""

    def __init__(self, path, line_number, message):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {message}")


def log_status(message, emoji="🔍"):
    """Diagnostics only; stdout stays reserved for results."""
    print(f"{emoji} {message}", file=sys.stderr)


def _content_lines(text):
    """(line number, tokens) for every non-blank, non-comment line."""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if line:
            yield number, line.split()


def _read(path):
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def _ints(path, number, tokens, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(path, number, f"{what} must be integers, got {' '.join(tokens)!r}")


def parse_graph(text, path="<graph>"):
    vertex_count = None
    edges = []
    last = 0
    for number, tokens in _content_lines(text):
        last = number
        keyword = tokens[0]
        if vertex_count is None:
            if keyword != 'vertices' or len(tokens) != 2:
                raise ParseError(path, number, "first line must be `vertices N`")
            vertex_count = _ints(path, number, tokens[1:], "vertex count")[0]
        elif keyword == 'edge':
            if len(tokens) != 3:
                raise ParseError(path, number, "edge line must be `edge u v`")
            edges.append(tuple(_ints(path, number, tokens[1:], "edge endpoints")))
        else:
            raise ParseError(path, number, f"unknown keyword {keyword!r}")
    if vertex_count is None:
        raise ParseError(path, last, "missing `vertices N` line")
    return build_graph(vertex_count, edges)


def format_graph(g):
    lines = [f"vertices {g.vertex_count}"]
    lines.extend(f"edge {a} {b}" for a, b in g.edges)
    return "\n".join(lines) + "\n"


def parse_model(text, g, path="<model>"):
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError(path, 0, "model file is empty")
    number, tokens = lines[0]
    if tokens[0] in ('asm', 'cfm'):
        if len(tokens) != 1:
            raise ParseError(path, number, f"`{tokens[0]}` takes no arguments")
        if len(lines) > 1:
            raise ParseError(path, lines[1][0], f"`{tokens[0]}` must be the only line of a model file")
        return asm_cover(g) if tokens[0] == 'asm' else cfm_cover(g)

    sets = []
    for number, tokens in lines:
        keyword = tokens[0]
        if keyword != 'set' or len(tokens) < 2:
            raise ParseError(path, number, "model lines are `asm`, `cfm` or `set v ...`")
        sets.append(_ints(path, number, tokens[1:], "set members"))
    return build_model(g, sets)


def format_model(g, h):
    name = model_name(g, h)
    if name in ('asm', 'cfm'):
        return name + "\n"
    return h.describe() + "\n"


def parse_configuration(text, path="<configuration>"):
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError(path, 0, "configuration file is empty")
    number, tokens = lines[0]
    if tokens[0] != 'chips':
        raise ParseError(path, number, "configuration line must be `chips c1 ... cn`")
    if len(lines) > 1:
        raise ParseError(path, lines[1][0], "only one `chips` line is allowed")
    return Configuration(_ints(path, number, tokens[1:], "chip counts"))


def format_configuration(D):
    return "chips " + " ".join(str(c) for c in D.chips)


def _edge_id(path, number, token):
    digits = token[1:] if token.startswith('e') else token
    if not digits.isdigit():
        raise ParseError(path, number, f"bad edge identifier {token!r}")
    return int(digits)


def parse_tree(text, path="<tree>"):
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError(path, 0, "tree file is empty")
    number, tokens = lines[0]
    if tokens[0] != 'tree':
        raise ParseError(path, number, "tree line must be `tree e_i e_j ...`")
    ids = [_edge_id(path, number, token) for token in tokens[1:]]
    if len(set(ids)) != len(ids):
        raise ParseError(path, number, "repeated edge identifier")
    return SpanningTree(frozenset(ids))


def format_tree(T):
    return "tree " + " ".join(f"e{eid}" for eid in T.sorted_ids())


def load_graph(path):
    return parse_graph(_read(path), path)


def load_model(spec, g):
    """`asm`, `cfm`, or the path of a model file."""
    if spec in ('asm', 'cfm'):
        return asm_cover(g) if spec == 'asm' else cfm_cover(g)
    return parse_model(_read(spec), g, spec)


def load_configuration(path):
    return parse_configuration(_read(path), path)


def load_tree(path):
    return parse_tree(_read(path), path)
