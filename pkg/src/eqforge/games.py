"""Exact-arithmetic core for two-player cost games.

Players *minimize* cost.  This module holds the game representations (full
cost tables, the two-values restriction, the condensed array form of normal
games), mixed strategies with exact rational probabilities, and the
elementary structure predicates (normality, domination, b-blocks) together
with the support-manipulation constructions used by the equilibrium
pipeline.

Everything here computes in exact rationals: equality of expectations and
supports must never depend on floating-point rounding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "EqforgeError",
    "InputError",
    "InvariantError",
    "Game",
    "TwoValuesGame",
    "MixedStrategy",
    "Profile",
    "CondensedNormalGame",
    "rational",
    "x_value",
    "expectation",
    "is_E_equilibrium",
    "is_normal",
    "to_condensed",
    "from_condensed",
    "dominates",
    "is_b_block",
    "pure_equilibria",
    "derive_pure_from_singleton",
    "halfhalf_normalize",
    "game_to_json",
    "game_from_json",
    "condensed_to_json",
    "condensed_from_json",
    "profile_to_json",
    "profile_from_json",
]


class EqforgeError(Exception):
    """Base class for all errors raised by this package."""


class InputError(EqforgeError):
    """Malformed or out-of-contract input (CLI exit code 2)."""


class InvariantError(EqforgeError):
    """An internal invariant that should be unbreakable was broken."""


def rational(value) -> Fraction:
    """Coerce ints, rational strings ("3/4", "2", "0.25") or Fractions."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    if isinstance(value, float):
        # Floats are accepted only for convenience at the CLI boundary.
        return Fraction(value).limit_denominator(10**12)
    raise InputError(f"cannot interpret {value!r} as a rational")


def _matrix(rows: Iterable[Iterable]) -> tuple[tuple[Fraction, ...], ...]:
    out = tuple(tuple(rational(v) for v in r) for r in rows)
    if not out or not out[0]:
        raise InputError("cost matrix must be non-empty")
    width = len(out[0])
    if any(len(r) != width for r in out):
        raise InputError("cost matrix rows have unequal lengths")
    for r in out:
        for v in r:
            if v < 0:
                raise InputError("costs must be non-negative")
    return out


@dataclass(frozen=True)
class Game:
    """A finite two-player cost game given by the two cost tables.

    ``mu1[i][j]`` is player 1's cost when player 1 plays row ``i`` and
    player 2 plays column ``j``; ``mu2`` likewise for player 2.
    """

    mu1: tuple[tuple[Fraction, ...], ...]
    mu2: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "mu1", _matrix(self.mu1))
        object.__setattr__(self, "mu2", _matrix(self.mu2))
        if len(self.mu1) != len(self.mu2) or len(self.mu1[0]) != len(self.mu2[0]):
            raise InputError("mu1 and mu2 must have identical dimensions")

    @property
    def n1(self) -> int:
        return len(self.mu1)

    @property
    def n2(self) -> int:
        return len(self.mu1[0])

    def cost(self, k: int, i: int, j: int) -> Fraction:
        _check_player(k)
        return self.mu1[i][j] if k == 1 else self.mu2[i][j]


@dataclass(frozen=True)
class TwoValuesGame:
    """A game whose every cost is one of two values a < b."""

    game: Game
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", rational(self.a))
        object.__setattr__(self, "b", rational(self.b))
        if not self.a < self.b:
            raise InputError("two-values game requires a < b")
        allowed = {self.a, self.b}
        for mat in (self.game.mu1, self.game.mu2):
            for r in mat:
                for v in r:
                    if v not in allowed:
                        raise InputError(f"cost {v} is neither a={self.a} nor b={self.b}")

    @classmethod
    def from_cells(cls, cells: Sequence[Sequence[tuple]], a, b) -> "TwoValuesGame":
        """Build from a grid of (player-1 letter, player-2 letter) pairs.

        Letters are the strings "a"/"b" (or the actual cost values).
        """
        a, b = rational(a), rational(b)
        lut = {"a": a, "b": b, a: a, b: b}
        try:
            mu1 = [[lut[c[0]] for c in row] for row in cells]
            mu2 = [[lut[c[1]] for c in row] for row in cells]
        except KeyError as exc:
            raise InputError(f"cell letter {exc.args[0]!r} is neither 'a' nor 'b'") from exc
        return cls(Game(mu1, mu2), a, b)

    # Delegates so call sites do not have to spell g.game.mu1 everywhere.
    @property
    def mu1(self):
        return self.game.mu1

    @property
    def mu2(self):
        return self.game.mu2

    @property
    def n1(self) -> int:
        return self.game.n1

    @property
    def n2(self) -> int:
        return self.game.n2

    def cost(self, k: int, i: int, j: int) -> Fraction:
        return self.game.cost(k, i, j)


class MixedStrategy(tuple):
    """A probability vector with exact rational entries summing to 1."""

    def __new__(cls, probs: Iterable):
        vals = tuple(rational(p) for p in probs)
        if not vals:
            raise InputError("mixed strategy must have at least one entry")
        if any(p < 0 for p in vals):
            raise InputError("mixed strategy has a negative probability")
        if sum(vals) != 1:
            raise InputError(f"probabilities sum to {sum(vals)}, not 1")
        return super().__new__(cls, vals)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self) if p > 0)

    def is_pure(self) -> bool:
        return len(self.support()) == 1

    @classmethod
    def pure(cls, n: int, i: int) -> "MixedStrategy":
        if not 0 <= i < n:
            raise InputError(f"pure strategy {i} out of range [0,{n})")
        return cls(tuple(Fraction(int(t == i)) for t in range(n)))

    @classmethod
    def uniform(cls, n: int) -> "MixedStrategy":
        return cls((Fraction(1, n),) * n)

    @classmethod
    def uniform_on(cls, n: int, support: Iterable[int]) -> "MixedStrategy":
        sup = sorted(set(support))
        if not sup or sup[0] < 0 or sup[-1] >= n:
            raise InputError("support out of range")
        w = Fraction(1, len(sup))
        return cls(tuple(w if i in set(sup) else Fraction(0) for i in range(n)))


@dataclass(frozen=True)
class Profile:
    """A mixed-strategy pair ``(p1, p2)``."""

    p1: MixedStrategy
    p2: MixedStrategy

    def __post_init__(self):
        object.__setattr__(self, "p1", MixedStrategy(self.p1))
        object.__setattr__(self, "p2", MixedStrategy(self.p2))

    def supports(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.p1.support(), self.p2.support()

    @classmethod
    def pure(cls, n1: int, n2: int, i: int, j: int) -> "Profile":
        return cls(MixedStrategy.pure(n1, i), MixedStrategy.pure(n2, j))


class CondensedNormalGame:
    """Array form of a normal game.

    A normal game is square with exactly one ``a`` per column of ``mu1``
    (at row ``row[j]``), exactly one ``a`` per row of ``mu2`` (at column
    ``col[i]``), and no cell where both players pay ``a``.  The arrays are
    the whole game; the matrices are never materialized for large ``n``.
    """

    __slots__ = ("n", "col", "row", "a", "b")

    def __init__(self, col, row, a, b):
        col = np.asarray(col, dtype=np.int64)
        row = np.asarray(row, dtype=np.int64)
        if col.ndim != 1 or row.ndim != 1 or len(col) != len(row):
            raise InputError("col and row must be equal-length 1-d arrays")
        n = len(col)
        if n < 2:
            raise InputError("normal games need at least 2 strategies")
        if col.min() < 0 or col.max() >= n or row.min() < 0 or row.max() >= n:
            raise InputError("col/row entries out of range")
        if np.any(col[row] == np.arange(n)):
            raise InputError("condensed game has an (a,a) cell: col[row[j]] == j")
        if len(np.unique(col)) < 2 or len(np.unique(row)) < 2:
            raise InputError("image of col and of row must each have size >= 2")
        self.n = n
        self.col = col
        self.row = row
        self.a = rational(a)
        self.b = rational(b)
        if not self.a < self.b:
            raise InputError("condensed game requires a < b")

    def __eq__(self, other):
        return (
            isinstance(other, CondensedNormalGame)
            and self.n == other.n
            and self.a == other.a
            and self.b == other.b
            and bool(np.all(self.col == other.col))
            and bool(np.all(self.row == other.row))
        )

    def __repr__(self):
        return f"CondensedNormalGame(n={self.n}, col={self.col.tolist()}, row={self.row.tolist()})"

    def swap_players(self) -> "CondensedNormalGame":
        """The same game with the players exchanged (col and row trade roles)."""
        return CondensedNormalGame(self.row, self.col, self.a, self.b)


def _check_player(k: int):
    if k not in (1, 2):
        raise InputError(f"player index must be 1 or 2, got {k}")


def _check_dims(g, prof: Profile):
    if len(prof.p1) != g.n1 or len(prof.p2) != g.n2:
        raise InputError(
            f"profile dimensions ({len(prof.p1)},{len(prof.p2)}) do not match game ({g.n1},{g.n2})"
        )


def x_value(g: TwoValuesGame, k: int, prof: Profile) -> Fraction:
    """Probability that player ``k`` pays ``a`` under the profile.

    Bilinear in the two strategies; this single number determines player
    k's cost distribution in a two-values game.
    """
    _check_player(k)
    _check_dims(g, prof)
    mat = g.mu1 if k == 1 else g.mu2
    total = Fraction(0)
    for i, pi in enumerate(prof.p1):
        if pi == 0:
            continue
        row = mat[i]
        s = Fraction(0)
        for j, pj in enumerate(prof.p2):
            if pj != 0 and row[j] == g.a:
                s += pj
        total += pi * s
    return total


def expectation(g, k: int, prof: Profile) -> Fraction:
    """Expected cost of player ``k``; works for any Game."""
    _check_player(k)
    _check_dims(g, prof)
    mat = g.mu1 if k == 1 else g.mu2
    total = Fraction(0)
    for i, pi in enumerate(prof.p1):
        if pi == 0:
            continue
        row = mat[i]
        total += pi * sum((pj * row[j] for j, pj in enumerate(prof.p2) if pj != 0), Fraction(0))
    return total


def _expectation_vs_pure(g, k: int, pure: int, opp: MixedStrategy) -> Fraction:
    """E_k when player k plays ``pure`` and the opponent mixes ``opp``."""
    mat = g.mu1 if k == 1 else g.mu2
    if k == 1:
        return sum((opp[j] * mat[pure][j] for j in range(len(opp)) if opp[j] != 0), Fraction(0))
    return sum((opp[i] * mat[i][pure] for i in range(len(opp)) if opp[i] != 0), Fraction(0))


def is_E_equilibrium(g, prof: Profile) -> bool:
    """Exact check that no player can lower expected cost unilaterally.

    Linearity makes pure deviations sufficient.
    """
    _check_dims(g, prof)
    for k, own, opp, n in ((1, prof.p1, prof.p2, g.n1), (2, prof.p2, prof.p1, g.n2)):
        current = expectation(g, k, prof)
        for s in range(n):
            if _expectation_vs_pure(g, k, s, opp) < current:
                return False
    return True


def is_normal(g: TwoValuesGame) -> bool:
    """Square, one ``a`` per mu1-column, one ``a`` per mu2-row, no (a,a) cell."""
    n = g.n1
    if g.n2 != n or n < 2:
        return False
    a = g.a
    for j in range(n):
        if sum(1 for i in range(n) if g.mu1[i][j] == a) != 1:
            return False
    for i in range(n):
        if sum(1 for j in range(n) if g.mu2[i][j] == a) != 1:
            return False
    for i in range(n):
        for j in range(n):
            if g.mu1[i][j] == a and g.mu2[i][j] == a:
                return False
    return True


def to_condensed(g: TwoValuesGame) -> CondensedNormalGame:
    """Collapse a normal game to its (col, row) arrays."""
    if not is_normal(g):
        raise InputError("to_condensed requires a normal game")
    n = g.n1
    row = [next(i for i in range(n) if g.mu1[i][j] == g.a) for j in range(n)]
    col = [next(j for j in range(n) if g.mu2[i][j] == g.a) for i in range(n)]
    return CondensedNormalGame(col, row, g.a, g.b)


def from_condensed(c: CondensedNormalGame, max_n: int = 4096) -> TwoValuesGame:
    """Expand the arrays back into full matrices (small n only: O(n^2))."""
    n = c.n
    if n > max_n:
        raise InputError(
            f"refusing to expand a condensed game with n={n} into dense "
            f"{n}x{n} matrices (limit {max_n}); the winning-pair routines "
            "work on the condensed form directly"
        )
    a, b = c.a, c.b
    row = c.row.tolist()
    col = c.col.tolist()
    mu1 = [[a if i == row[j] else b for j in range(n)] for i in range(n)]
    mu2 = [[a if j == col[i] else b for j in range(n)] for i in range(n)]
    return TwoValuesGame(Game(mu1, mu2), a, b)


def dominates(g, k: int, ell: int, ell2: int, opp_support: Iterable[int]) -> bool:
    """Weak domination of strategy ``ell`` over ``ell2`` on the given columns
    (rows, for player 2), with strict improvement somewhere."""
    _check_player(k)
    sup = sorted(set(opp_support))
    if not sup:
        raise InputError("opp_support must be nonempty")
    n_own = g.n1 if k == 1 else g.n2
    n_opp = g.n2 if k == 1 else g.n1
    if not (0 <= ell < n_own and 0 <= ell2 < n_own):
        raise InputError("strategy index out of range")
    if sup[0] < 0 or sup[-1] >= n_opp:
        raise InputError("opponent support out of range")
    mat = g.mu1 if k == 1 else g.mu2
    cost = (lambda s, t: mat[s][t]) if k == 1 else (lambda s, t: mat[t][s])
    le_everywhere = all(cost(ell, t) <= cost(ell2, t) for t in sup)
    lt_somewhere = any(cost(ell, t) < cost(ell2, t) for t in sup)
    return le_everywhere and lt_somewhere


def is_b_block(g: TwoValuesGame, A: Iterable[int], B: Iterable[int], kind: str) -> bool:
    """Is every designated cost on the rectangle A x B equal to b?

    kind: "player-1" (mu1 only), "player-2" (mu2 only), or "double" (both).
    """
    A, B = sorted(set(A)), sorted(set(B))
    if not A or not B:
        raise InputError("A and B must be nonempty")
    if A[0] < 0 or A[-1] >= g.n1 or B[0] < 0 or B[-1] >= g.n2:
        raise InputError("A/B indices out of range")
    if kind not in ("player-1", "player-2", "double"):
        raise InputError(f"unknown block kind {kind!r}")
    mats = {"player-1": (g.mu1,), "player-2": (g.mu2,), "double": (g.mu1, g.mu2)}[kind]
    return all(mat[i][j] == g.b for mat in mats for i in A for j in B)


def pure_equilibria(g) -> list[Profile]:
    """All cells where neither player has an improving pure deviation."""
    out = []
    n1, n2 = g.n1, g.n2
    col_min = [min(g.mu1[i][j] for i in range(n1)) for j in range(n2)]
    row_min = [min(g.mu2[i][j] for j in range(n2)) for i in range(n1)]
    for i in range(n1):
        for j in range(n2):
            if g.mu1[i][j] == col_min[j] and g.mu2[i][j] == row_min[i]:
                out.append(Profile.pure(n1, n2, i, j))
    return out


def derive_pure_from_singleton(g: TwoValuesGame, prof: Profile) -> Profile:
    """Turn an expectation equilibrium with a singleton support into a pure one.

    If player 1 is pure on i*, the pure column is the smallest j in the
    support of p2 minimizing mu1[i*][j]; symmetric when player 2 is pure.
    The output is checked to be a pure equilibrium.
    """
    _check_dims(g, prof)
    s1, s2 = prof.supports()
    if len(s1) != 1 and len(s2) != 1:
        raise InputError("derive_pure_from_singleton needs a singleton support")
    if not is_E_equilibrium(g, prof):
        raise InputError("profile is not an expectation equilibrium")
    if len(s1) == 1 and len(s2) == 1:
        pure = prof
    elif len(s1) == 1:
        istar = s1[0]
        jhat = min(s2, key=lambda j: (g.mu1[istar][j], j))
        pure = Profile.pure(g.n1, g.n2, istar, jhat)
    else:
        jstar = s2[0]
        ihat = min(s1, key=lambda i: (g.mu2[i][jstar], i))
        pure = Profile.pure(g.n1, g.n2, ihat, jstar)
    if pure not in pure_equilibria(g):
        raise InvariantError("derived pure profile failed the equilibrium re-check")
    return pure


def halfhalf_normalize(g: TwoValuesGame, prof: Profile) -> Profile:
    """Replace p2 by the uniform distribution on its 2-element support.

    Requires an expectation equilibrium; the output is re-verified to be
    one (it always is for two-values games).
    """
    _check_dims(g, prof)
    s2 = prof.p2.support()
    if len(s2) != 2:
        raise InputError("halfhalf_normalize requires |support(p2)| == 2")
    if not is_E_equilibrium(g, prof):
        raise InputError("profile is not an expectation equilibrium")
    out = Profile(prof.p1, MixedStrategy.uniform_on(g.n2, s2))
    if not is_E_equilibrium(g, out):
        raise InvariantError("half-half normalization broke the equilibrium")
    return out


# ---------------------------------------------------------------------------
# JSON formats
# ---------------------------------------------------------------------------


def _rat_str(v: Fraction) -> str:
    return str(v)


def game_to_json(g) -> dict:
    if isinstance(g, TwoValuesGame):
        cells = [
            [["a" if g.mu1[i][j] == g.a else "b", "a" if g.mu2[i][j] == g.a else "b"]
             for j in range(g.n2)]
            for i in range(g.n1)
        ]
        return {"a": _rat_str(g.a), "b": _rat_str(g.b), "cells": cells}
    return {
        "mu1": [[_rat_str(v) for v in r] for r in g.mu1],
        "mu2": [[_rat_str(v) for v in r] for r in g.mu2],
    }


def game_from_json(d: dict):
    if "cells" in d:
        return TwoValuesGame.from_cells(d["cells"], d["a"], d["b"])
    if "mu1" in d and "mu2" in d:
        return Game(d["mu1"], d["mu2"])
    raise InputError("game JSON needs either 'cells' (+a,b) or 'mu1'/'mu2'")


def condensed_to_json(c: CondensedNormalGame) -> dict:
    return {
        "n": c.n,
        "col": c.col.tolist(),
        "row": c.row.tolist(),
        "a": _rat_str(c.a),
        "b": _rat_str(c.b),
    }


def condensed_from_json(d: dict) -> CondensedNormalGame:
    try:
        return CondensedNormalGame(d["col"], d["row"], d["a"], d["b"])
    except KeyError as exc:
        raise InputError(f"condensed JSON missing key {exc.args[0]!r}") from exc


def profile_to_json(prof: Profile) -> dict:
    return {"p1": [_rat_str(p) for p in prof.p1], "p2": [_rat_str(p) for p in prof.p2]}


def profile_from_json(d: dict) -> Profile:
    try:
        return Profile(MixedStrategy(d["p1"]), MixedStrategy(d["p2"]))
    except KeyError as exc:
        raise InputError(f"profile JSON missing key {exc.args[0]!r}") from exc


def dump_json(obj: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
