"""Continuous-logic formulas over finite metric spaces.

Formulas take values in [0,1].  The connective basis is Const, Dist, Monus
(truncated subtraction), Min, Max, AbsDiff, and the quantifiers Sup/Inf,
which range over all points of a finite space and are therefore evaluated as
exact maxima/minima: no sampling, no tolerance.  A sentence "holds" in a
space when its value is 0.

Text syntax (whitespace-insensitive, LL(1)):

    formula := "sup" IDENT "." formula | "inf" IDENT "." formula | term
    term    := "min" "(" formula ("," formula)* ")"
             | "max" "(" formula ("," formula)* ")"
             | "monus" "(" formula "," formula ")"
             | "absdiff" "(" formula "," formula ")"
             | "d" "(" IDENT "," IDENT ")"
             | NUMBER                       # decimal constant in [0,1]

    IDENT := letter followed by alphanumerics (keywords are reserved)
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Callable, Sequence, Union

from .errors import FormulaParseError, UnboundVariableError
from .indexing import pair_index
from .spaces import DistanceVector, FiniteMetricSpace, OnePointExtension

__all__ = [
    "Const",
    "Dist",
    "Monus",
    "Min",
    "Max",
    "AbsDiff",
    "Sup",
    "Inf",
    "Formula",
    "AxiomTask",
    "eval_formula",
    "eval_on_dvec",
    "parse_formula",
    "format_formula",
    "free_variables",
    "is_sentence",
    "build_conf",
    "build_extension_axiom",
    "build_phi_geq_half",
]


@dataclass(frozen=True)
class Const:
    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"constant {self.value!r} outside [0,1]")


@dataclass(frozen=True)
class Dist:
    u: str
    v: str


@dataclass(frozen=True)
class Monus:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Min:
    args: tuple["Formula", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("min needs at least one argument")


@dataclass(frozen=True)
class Max:
    args: tuple["Formula", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("max needs at least one argument")


@dataclass(frozen=True)
class AbsDiff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Sup:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Inf:
    var: str
    body: "Formula"


Formula = Union[Const, Dist, Monus, Min, Max, AbsDiff, Sup, Inf]


def free_variables(f: Formula) -> frozenset[str]:
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, Dist):
        return frozenset((f.u, f.v))
    if isinstance(f, (Monus, AbsDiff)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Min, Max)):
        out: frozenset[str] = frozenset()
        for a in f.args:
            out |= free_variables(a)
        return out
    return free_variables(f.body) - {f.var}


def is_sentence(f: Formula) -> bool:
    return not free_variables(f)


def _eval(f: Formula, dist: Callable[[int, int], float], n: int, env: dict) -> float:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Dist):
        try:
            i = env[f.u]
        except KeyError:
            raise UnboundVariableError(f.u) from None
        try:
            j = env[f.v]
        except KeyError:
            raise UnboundVariableError(f.v) from None
        return dist(i, j)
    if isinstance(f, Monus):
        return max(_eval(f.left, dist, n, env) - _eval(f.right, dist, n, env), 0.0)
    if isinstance(f, Min):
        return min(_eval(a, dist, n, env) for a in f.args)
    if isinstance(f, Max):
        return max(_eval(a, dist, n, env) for a in f.args)
    if isinstance(f, AbsDiff):
        return abs(_eval(f.left, dist, n, env) - _eval(f.right, dist, n, env))
    if isinstance(f, (Sup, Inf)):
        pick = max if isinstance(f, Sup) else min
        saved = env.get(f.var)
        had = f.var in env
        best = None
        for p in range(1, n + 1):
            env[f.var] = p
            val = _eval(f.body, dist, n, env)
            best = val if best is None else pick(best, val)
        if had:
            env[f.var] = saved
        else:
            del env[f.var]
        return best
    raise TypeError(f"not a formula node: {f!r}")


def eval_formula(
    f: Formula, space: FiniteMetricSpace, env: dict[str, int] | None = None
) -> float:
    """Exact value of ``f`` on ``space`` under the assignment ``env``
    (variable name to 1-based point index).  Cost O(n^q * |f|) for q nested
    quantifiers."""
    mat = space.dist

    def dist(i: int, j: int) -> float:
        return float(mat[i - 1, j - 1])

    return _eval(f, dist, space.n, dict(env or {}))


def eval_on_dvec(
    f: Formula, d: DistanceVector, env: dict[str, int] | None = None
) -> float:
    """Value of ``f`` with d(v_i, v_j) read directly off the coordinates of
    ``d``.  Metricity is not required; on metric vectors this equals
    evaluation on the converted space, exactly."""
    coords = d.coords
    n = d.n

    def dist(i: int, j: int) -> float:
        if i == j:
            return 0.0
        lo, hi = (i, j) if i < j else (j, i)
        return float(coords[pair_index(lo, hi, n)])

    return _eval(f, dist, n, dict(env or {}))


# ---------------------------------------------------------------------------
# parser / printer
# ---------------------------------------------------------------------------

_KEYWORDS = {"sup", "inf", "min", "max", "monus", "absdiff", "d"}
_TOKEN = re.compile(r"\s*(?:(?P<num>\d+\.\d+|\.\d+|\d+)|(?P<ident>[A-Za-z][A-Za-z0-9]*)|(?P<punct>[(),.]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int, int]] = []
        self._tokenize()
        self.idx = 0

    def _line_col(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        start = self.text.rfind("\n", 0, pos) + 1
        return line, pos - start + 1

    def _tokenize(self):
        pos = 0
        text = self.text
        while pos < len(text):
            match = _TOKEN.match(text, pos)
            if match is None or match.end() == match.start():
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                at = pos + (len(text[pos:]) - len(stripped))
                line, col = self._line_col(at)
                raise FormulaParseError(
                    f"unexpected character {stripped[0]!r}", line, col
                )
            kind = match.lastgroup
            value = match.group(kind)
            start = match.end() - len(value)
            self.tokens.append((kind, value, *self._line_col(start)))
            pos = match.end()

    def _peek(self):
        return self.tokens[self.idx] if self.idx < len(self.tokens) else None

    def _next(self, expect_kind=None, expect_value=None):
        tok = self._peek()
        if tok is None:
            line, col = self._line_col(len(self.text))
            want = expect_value or expect_kind or "token"
            raise FormulaParseError(f"unexpected end of input, expected {want}", line, col)
        kind, value, line, col = tok
        if expect_kind is not None and kind != expect_kind:
            raise FormulaParseError(
                f"expected {expect_value or expect_kind}, found {value!r}", line, col
            )
        if expect_value is not None and value != expect_value:
            raise FormulaParseError(
                f"expected {expect_value!r}, found {value!r}", line, col
            )
        self.idx += 1
        return tok

    def _ident(self) -> str:
        kind, value, line, col = self._next("ident")
        if value in _KEYWORDS:
            raise FormulaParseError(
                f"keyword {value!r} cannot be used as a variable", line, col
            )
        return value

    def parse(self) -> Formula:
        f = self._formula()
        tok = self._peek()
        if tok is not None:
            raise FormulaParseError(
                f"trailing input starting at {tok[1]!r}", tok[2], tok[3]
            )
        return f

    def _formula(self) -> Formula:
        tok = self._peek()
        if tok is not None and tok[0] == "ident" and tok[1] in ("sup", "inf"):
            self._next()
            var = self._ident()
            self._next("punct", ".")
            body = self._formula()
            return Sup(var, body) if tok[1] == "sup" else Inf(var, body)
        return self._term()

    def _args(self) -> list[Formula]:
        self._next("punct", "(")
        args = [self._formula()]
        while True:
            tok = self._peek()
            if tok is not None and tok[0] == "punct" and tok[1] == ",":
                self._next()
                args.append(self._formula())
            else:
                break
        self._next("punct", ")")
        return args

    def _term(self) -> Formula:
        tok = self._peek()
        if tok is None:
            line, col = self._line_col(len(self.text))
            raise FormulaParseError("unexpected end of input", line, col)
        kind, value, line, col = tok
        if kind == "num":
            self._next()
            number = float(value)
            if number > 1.0:
                raise FormulaParseError(
                    f"constant {value} outside [0,1]", line, col
                )
            return Const(number)
        if kind == "ident":
            if value in ("min", "max"):
                self._next()
                args = self._args()
                return Min(tuple(args)) if value == "min" else Max(tuple(args))
            if value in ("monus", "absdiff"):
                self._next()
                args = self._args()
                if len(args) != 2:
                    raise FormulaParseError(
                        f"{value} takes exactly two arguments, got {len(args)}",
                        line,
                        col,
                    )
                return Monus(*args) if value == "monus" else AbsDiff(*args)
            if value == "d":
                self._next()
                self._next("punct", "(")
                u = self._ident()
                self._next("punct", ",")
                v = self._ident()
                self._next("punct", ")")
                return Dist(u, v)
            raise FormulaParseError(f"unexpected identifier {value!r}", line, col)
        raise FormulaParseError(f"unexpected token {value!r}", line, col)


def parse_formula(text: str) -> Formula:
    """Parse DSL text to an AST; inverse of :func:`format_formula`."""
    return _Parser(text).parse()


def _format_const(value: float) -> str:
    # the grammar has no exponent notation; tiny constants get their exact
    # fixed-point expansion instead of repr's scientific form
    s = repr(float(value))
    if "e" in s or "E" in s:
        s = format(Decimal(float(value)), "f")
    return s


def format_formula(f: Formula) -> str:
    """Canonical text of ``f``; round-trips through :func:`parse_formula`."""
    if isinstance(f, Const):
        return _format_const(f.value)
    if isinstance(f, Dist):
        return f"d({f.u}, {f.v})"
    if isinstance(f, Monus):
        return f"monus({format_formula(f.left)}, {format_formula(f.right)})"
    if isinstance(f, AbsDiff):
        return f"absdiff({format_formula(f.left)}, {format_formula(f.right)})"
    if isinstance(f, Min):
        return "min(" + ", ".join(format_formula(a) for a in f.args) + ")"
    if isinstance(f, Max):
        return "max(" + ", ".join(format_formula(a) for a in f.args) + ")"
    if isinstance(f, Sup):
        return f"sup {f.var} . {format_formula(f.body)}"
    if isinstance(f, Inf):
        return f"inf {f.var} . {format_formula(f.body)}"
    raise TypeError(f"not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# the specific formula families
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AxiomTask:
    """One extension axiom: a template pair plus a tolerance epsilon."""

    ext: OnePointExtension
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon!r}")


def build_conf(x: FiniteMetricSpace, var_names: Sequence[str]) -> Formula:
    """Configuration-distance formula of the template ``x`` with the given
    free variables; Const(0) for templates with at most one point."""
    k = x.n
    if len(var_names) != k:
        raise ValueError(f"need {k} variable names, got {len(var_names)}")
    if len(set(var_names)) != k:
        raise ValueError(f"variable names must be distinct, got {var_names!r}")
    for name in var_names:
        if name in _KEYWORDS:
            raise ValueError(f"variable name {name!r} collides with a keyword")
    if k <= 1:
        return Const(0.0)
    terms = tuple(
        AbsDiff(Const(float(x.dist[i, j])), Dist(var_names[i], var_names[j]))
        for i in range(k)
        for j in range(i + 1, k)
    )
    return Max(terms)


def build_extension_axiom(task: AxiomTask) -> Formula:
    """Sentence whose value is 0 when every near-copy of the base template
    extends to a near-copy of the one-point extension within epsilon."""
    k = task.ext.base.n
    vars_ = [f"v{i}" for i in range(1, k + 1)]
    eps = Const(task.epsilon)
    witness = "w"
    body = Min(
        (
            Monus(eps, build_conf(task.ext.base, vars_)),
            Inf(witness, Monus(build_conf(task.ext.extension, vars_ + [witness]), eps)),
        )
    )
    for var in reversed(vars_):
        body = Sup(var, body)
    return body


def build_phi_geq_half() -> Formula:
    """Sentence with value 0 exactly when all nontrivial distances are >= 1/2."""
    return Sup(
        "x",
        Sup("y", Min((Dist("x", "y"), Monus(Const(0.5), Dist("x", "y"))))),
    )
