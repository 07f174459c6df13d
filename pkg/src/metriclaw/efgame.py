"""The epsilon Ehrenfeucht-Fraisse game on finite metric spaces.

In the n-round game between spaces X and Y, player I picks a point of X or
of Y each round and player II answers with a point of the other space.
Player II wins a run when every matched pair of rounds i < j satisfies
|d_X(a_i, a_j) - d_Y(b_i, b_j)| < epsilon (strict).  The win condition is
monotone: once some pair is off by epsilon or more, no continuation can
repair it, so the solver extends positions only with responses that keep
every new pair strictly inside epsilon.

Decision is by exhaustive backward induction with memoization on
(a_tuple, b_tuple, rounds_left); worst-case state count is of order
((|X| + |Y|) * max(|X|, |Y|))^n, so a log-scale budget guard rejects
instances that are clearly out of desk range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GameBudgetError, StrategyUnavailableError
from .spaces import FiniteMetricSpace

__all__ = [
    "GameState",
    "GameResult",
    "player_II_wins",
    "solve_game",
    "extract_strategy",
    "extension_responder",
    "DEFAULT_LOG_STATE_BUDGET",
]

DEFAULT_LOG_STATE_BUDGET = 22.0


@dataclass(frozen=True)
class GameState:
    """A position: equal-length tuples of 1-based picks in X and Y."""

    a_tuple: tuple[int, ...]
    b_tuple: tuple[int, ...]
    rounds_total: int
    epsilon: float

    def __post_init__(self):
        if len(self.a_tuple) != len(self.b_tuple):
            raise ValueError("a_tuple and b_tuple must have equal length")
        if len(self.a_tuple) > self.rounds_total:
            raise ValueError("more picks than rounds")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")

    def is_partial_loss(self, x: FiniteMetricSpace, y: FiniteMetricSpace) -> bool:
        """Whether some already-played pair violates the win condition."""
        a, b = self.a_tuple, self.b_tuple
        for i in range(len(a)):
            for j in range(i + 1, len(a)):
                if abs(x.dist[a[i] - 1, a[j] - 1] - y.dist[b[i] - 1, b[j] - 1]) >= self.epsilon:
                    return True
        return False


@dataclass
class GameResult:
    winner_is_II: bool
    explored_states: int
    rounds: int
    epsilon: float


class _Solver:
    def __init__(self, x: FiniteMetricSpace, y: FiniteMetricSpace, rounds: int, epsilon: float):
        self.dx = x.dist
        self.dy = y.dist
        self.nx = x.n
        self.ny = y.n
        self.rounds = rounds
        self.epsilon = epsilon
        self.memo: dict = {}

    def _ok(self, a: tuple, b: tuple, pa: int, pb: int) -> bool:
        # all new pairs formed by appending (pa, pb) stay strictly inside epsilon
        dx, dy, eps = self.dx, self.dy, self.epsilon
        for ai, bi in zip(a, b):
            if abs(dx[ai, pa] - dy[bi, pb]) >= eps:
                return False
        return True

    def wins(self, a: tuple = (), b: tuple = (), rounds_left: int | None = None) -> bool:
        if rounds_left is None:
            rounds_left = self.rounds
        if rounds_left == 0:
            return True
        key = (a, b, rounds_left)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        result = True
        # player I picks in X; player II answers in Y
        for pa in range(self.nx):
            if not any(
                self._ok(a, b, pa, pb) and self.wins(a + (pa,), b + (pb,), rounds_left - 1)
                for pb in range(self.ny)
            ):
                result = False
                break
        if result:
            # player I picks in Y; player II answers in X
            for pb in range(self.ny):
                if not any(
                    self._ok(a, b, pa, pb) and self.wins(a + (pa,), b + (pb,), rounds_left - 1)
                    for pa in range(self.nx)
                ):
                    result = False
                    break
        self.memo[key] = result
        return result


def _check_budget(x: FiniteMetricSpace, y: FiniteMetricSpace, rounds: int, budget: float):
    if rounds < 1:
        raise ValueError("the game needs at least one round")
    load = rounds * math.log(x.n * y.n) if x.n * y.n > 1 else 0.0
    if load > budget:
        raise GameBudgetError(
            f"game of {rounds} rounds on |X|={x.n}, |Y|={y.n} exceeds the "
            f"state budget (load {load:.1f} > {budget:.1f})"
        )


def solve_game(
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
    rounds: int,
    epsilon: float,
    *,
    max_log_states: float = DEFAULT_LOG_STATE_BUDGET,
) -> GameResult:
    """Decide the game and report the number of memoized positions."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    _check_budget(x, y, rounds, max_log_states)
    solver = _Solver(x, y, rounds, epsilon)
    winner = solver.wins()
    return GameResult(winner, len(solver.memo), rounds, epsilon)


def player_II_wins(
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
    rounds: int,
    epsilon: float,
    *,
    max_log_states: float = DEFAULT_LOG_STATE_BUDGET,
) -> bool:
    """True iff player II has a winning strategy in the n-round game at
    tolerance epsilon (strict comparisons)."""
    return solve_game(x, y, rounds, epsilon, max_log_states=max_log_states).winner_is_II


def extract_strategy(
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
    rounds: int,
    epsilon: float,
    *,
    max_log_states: float = DEFAULT_LOG_STATE_BUDGET,
) -> dict:
    """Winning-response table for player II.

    Maps each reachable winning position (under play through this very
    table) to a response for every player-I move; replaying any player-I
    line through the table ends in a winning final position.  Raises
    StrategyUnavailableError when player II loses.

    Keys are (a_tuple, b_tuple) with 1-based points; values map
    ("X", point) or ("Y", point) moves to the 1-based response.
    """
    _check_budget(x, y, rounds, max_log_states)
    solver = _Solver(x, y, rounds, epsilon)
    if not solver.wins():
        raise StrategyUnavailableError(
            "player II has no winning strategy; nothing to extract"
        )
    table: dict[tuple, dict] = {}

    def visit(a: tuple, b: tuple, rounds_left: int):
        if rounds_left == 0 or (a, b) in table:
            return
        entry: dict = {}
        for pa in range(solver.nx):
            for pb in range(solver.ny):
                if solver._ok(a, b, pa, pb) and solver.wins(
                    a + (pa,), b + (pb,), rounds_left - 1
                ):
                    entry[("X", pa + 1)] = pb + 1
                    break
        for pb in range(solver.ny):
            for pa in range(solver.nx):
                if solver._ok(a, b, pa, pb) and solver.wins(
                    a + (pa,), b + (pb,), rounds_left - 1
                ):
                    entry[("Y", pb + 1)] = pa + 1
                    break
        table[(a, b)] = entry
        for (side, mv), resp in entry.items():
            if side == "X":
                visit(a + (mv - 1,), b + (resp - 1,), rounds_left - 1)
            else:
                visit(a + (resp - 1,), b + (mv - 1,), rounds_left - 1)

    visit((), (), rounds)
    # re-key to 1-based tuples for the public table
    return {
        (tuple(i + 1 for i in a), tuple(i + 1 for i in b)): entry
        for (a, b), entry in table.items()
    }


def strategy_to_jsonable(table: dict) -> list[dict]:
    """Strategy table as a JSON-ready list of entries."""
    out = []
    for (a, b), entry in sorted(table.items()):
        out.append(
            {
                "a": list(a),
                "b": list(b),
                "moves": {f"{side}:{mv}": resp for (side, mv), resp in sorted(entry.items())},
            }
        )
    return out


def extension_responder(
    y: FiniteMetricSpace, b_tuple: tuple[int, ...] | list[int], targets: list[float]
) -> tuple[int, float]:
    """Best witness in ``y`` for target distances to the points ``b_tuple``.

    Returns (point, achieved) where ``point`` minimizes
    max_i |d_y(b_i, point) - targets_i| and ties go to the smallest index.
    This is the move a player following the extension axioms makes: with
    achieved < epsilon it completes a round without breaking the win
    condition.
    """
    if y.n < 1:
        raise ValueError("Y must be nonempty")
    if len(b_tuple) != len(targets):
        raise ValueError(
            f"tuple length {len(b_tuple)} does not match targets {len(targets)}"
        )
    best_point = 1
    best_val = math.inf
    for w in range(1, y.n + 1):
        val = 0.0
        for bi, t in zip(b_tuple, targets):
            gap = abs(float(y.dist[bi - 1, w - 1]) - t)
            if gap > val:
                val = gap
        if val < best_val:
            best_val = val
            best_point = w
    return best_point, float(best_val)
