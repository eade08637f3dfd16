"""Modal logic and graph neural network workbench.

Graphs and networks are plain dicts in the JSON schema used by the CLI.
"""

import json

from . import _core
from ._core import Formula, FormulaSyntaxError, GuardExceeded

__all__ = ["Formula", "FormulaSyntaxError", "GuardExceeded", "check", "compile", "classify",
           "extract", "solve_game", "verify", "scale", "unravel"]


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def _formula(f):
    return f if isinstance(f, Formula) else Formula(f)


def check(formula, graph):
    """Truth value of the formula at every vertex, in vertex order."""
    return _core.check_all(_formula(formula), _dump(graph))


def compile(formula, logic, activation="trrelu", bound=0, alphabet=()):
    return json.loads(_core.compile(_formula(formula), logic, activation, bound, list(alphabet)))


def classify(gnn, graph):
    return _core.classify_all(_dump(gnn), _dump(graph))


def extract(gnn, logic, bound=0):
    return _core.extract(_dump(gnn), logic, bound)


def solve_game(kind, rounds, g1, g2):
    """kind is ml, gml:C, afml1 or afml2."""
    return json.loads(_core.solve_game(kind, rounds, _dump(g1), _dump(g2)))


def verify(lhs, rhs, alphabet, max_size=3):
    """lhs and rhs are formula text, Formula objects or GNN dicts."""
    def side(s):
        return str(s) if isinstance(s, Formula) else _dump(s)
    return json.loads(_core.verify(side(lhs), side(rhs), list(alphabet), max_size))


def scale(graph, c):
    return json.loads(_core.scale(_dump(graph), c))


def unravel(graph, depth):
    return json.loads(_core.unravel(_dump(graph), depth))
