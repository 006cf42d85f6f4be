"""Generators for the named games and equilibrium constructions.

Two families drive everything:

* ``D_m``: an m x m normal game where player 1's cheap cell sits on the
  diagonal and player 2's sits one column to the right (cyclically).
* ``C_m``: D_m plus one extra strategy per player, wired so that the extra
  row is useless for player 1 while the extra column pays off only in the
  corner; this is the family whose equilibria can be destroyed entirely.

The module also carries the Crawford 2x2 three-values game, the four 4x4
fixtures used by the winning-pair search's residual case, the explicit
support/weight constructions that witness non-uniqueness or existence in
the theorem module, and a rejection sampler for random normal games.

Index note: every fixture here is 0-based; prose sources for these objects
number strategies from 1, so each fixture documents its shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .games import (
    CondensedNormalGame,
    Game,
    InputError,
    MixedStrategy,
    Profile,
    TwoValuesGame,
    from_condensed,
    rational,
)

__all__ = [
    "FamilySpec",
    "gen_D",
    "gen_C",
    "crawford",
    "known_equilibrium",
    "nis4_fixtures",
    "nis4_fixture_ids",
    "nis4_condensed",
    "random_normal",
]


@dataclass(frozen=True)
class FamilySpec:
    """Names a generated game (used in reports and the CLI)."""

    family: str  # "D" | "C" | "crawford" | "nis4" | "random"
    m: Optional[int] = None
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(1)
    fixture_id: Optional[str] = None
    n: Optional[int] = None
    seed: Optional[int] = None

    def describe(self) -> str:
        if self.family in ("D", "C"):
            return f"{self.family}_{self.m}(a={self.a}, b={self.b})"
        if self.family == "nis4":
            return f"nis4 fixture {self.fixture_id}"
        if self.family == "random":
            return f"random normal n={self.n} seed={self.seed}"
        return self.family


def gen_D(m: int, a=0, b=1) -> TwoValuesGame:
    """The m x m cyclic normal game: mu1 cheap on (i,i), mu2 on (i, i+1 mod m)."""
    if m < 2:
        raise InputError("gen_D requires m >= 2")
    a, b = rational(a), rational(b)
    mu1 = [[a if i == j else b for j in range(m)] for i in range(m)]
    mu2 = [[a if j == (i + 1) % m else b for j in range(m)] for i in range(m)]
    return TwoValuesGame(Game(mu1, mu2), a, b)


def gen_C(m: int, a=0, b=1) -> TwoValuesGame:
    """D_m extended by one strategy per player.

    Layout of the (m+1) x (m+1) tables: the top-left m x m block is D_m;
    row m is all b for player 1; column m is all b for player 1 except the
    corner mu1[0][m] = a; player 2 pays b everywhere on the new row and
    column except mu2[m][m] = a.
    """
    if m < 2:
        raise InputError("gen_C requires m >= 2")
    a, b = rational(a), rational(b)
    n = m + 1
    mu1 = [[b] * n for _ in range(n)]
    mu2 = [[b] * n for _ in range(n)]
    for i in range(m):
        for j in range(m):
            if i == j:
                mu1[i][j] = a
            if j == (i + 1) % m:
                mu2[i][j] = a
    mu1[0][m] = a
    mu2[m][m] = a
    return TwoValuesGame(Game(mu1, mu2), a, b)


def crawford() -> Game:
    """The fixed 2x2 three-values game ((2,2),(1,3); (1,3),(3,1))."""
    return Game([[2, 1], [1, 3]], [[2, 3], [3, 1]])


def _uniform_on(n: int, support) -> MixedStrategy:
    return MixedStrategy.uniform_on(n, support)


def known_equilibrium(family: str, m: int, regime: str) -> Profile:
    """The explicit support/weight constructions used as theorem witnesses.

    Regimes:
      D, "uniform"      both players uniform on all m strategies
      D, "even-split"   (m even) p1 uniform on even rows, p2 on odd columns
      D, "odd-block"    block supports: m even -> rows m/2..m-2 vs columns
                        0..m/2-2; m odd -> rows (m-1)/2..m-2 vs 0..(m-3)/2
      C, "uniform"      both uniform on the D-part strategies 0..m-1
      C, "C-even"       (m even) rows {m} u {m/2..m-2} vs columns 0..m/2-1
      C, "C-odd-equal"  (m odd) odd rows {1,3,..,m} vs columns {2,4,..,m-1, m}
      C, "C-odd-geq"    (m odd) rows {m} u {(m+1)/2..m-2} vs columns 0..(m-3)/2

    These verify as equilibria exactly in the parameter regimes the theorem
    module states; outside them they are well-formed profiles that fail
    verification.
    """
    if m < 2:
        raise InputError("m >= 2 required")
    if family == "D":
        n = m
        if regime == "uniform":
            return Profile(MixedStrategy.uniform(n), MixedStrategy.uniform(n))
        if regime == "even-split":
            if m % 2:
                raise InputError("even-split needs even m")
            return Profile(
                _uniform_on(n, range(0, m, 2)), _uniform_on(n, range(1, m, 2))
            )
        if regime == "odd-block":
            if m < 4:
                raise InputError("odd-block needs m >= 4")
            if m % 2 == 0:
                rows = range(m // 2, m - 1)
                cols = range(0, m // 2 - 1)
            else:
                rows = range((m - 1) // 2, m - 1)
                cols = range(0, (m - 1) // 2)
            return Profile(_uniform_on(n, rows), _uniform_on(n, cols))
        raise InputError(f"unknown regime {regime!r} for family D")
    if family == "C":
        n = m + 1
        if regime == "uniform":
            return Profile(_uniform_on(n, range(m)), _uniform_on(n, range(m)))
        if regime == "C-even":
            if m % 2:
                raise InputError("C-even needs even m")
            rows = [m] + list(range(m // 2, m - 1))
            cols = list(range(m // 2))
            return Profile(_uniform_on(n, rows), _uniform_on(n, cols))
        if regime == "C-odd-equal":
            if m % 2 == 0:
                raise InputError("C-odd-equal needs odd m")
            rows = list(range(1, m + 1, 2))
            cols = list(range(2, m, 2)) + [m]
            return Profile(_uniform_on(n, rows), _uniform_on(n, cols))
        if regime == "C-odd-geq":
            if m % 2 == 0:
                raise InputError("C-odd-geq needs odd m")
            rows = [m] + list(range((m + 1) // 2, m - 1))
            cols = list(range((m - 1) // 2))
            return Profile(_uniform_on(n, rows), _uniform_on(n, cols))
        raise InputError(f"unknown regime {regime!r} for family C")
    raise InputError(f"unknown family {family!r}")


# The four residual 4x4 structures whose diagonal shift-blocks all fail.
# Stored as (fixture id, row array with col = identity, expected pair).
# 0-based: the prose source numbers strategies 1..4 and columns shift by one.
_NIS4 = (
    ("1.1", (1, 2, 0, 2), ((1, 2), (0, 3))),
    ("1.2", (2, 0, 1, 2), ((0, 2), (1, 3))),
    ("2.3", (1, 2, 0, 0), ((0, 2), (1, 3))),
    ("2.4", (2, 0, 1, 1), ((0, 3), (0, 3))),
)


def nis4_fixtures(a=0, b=1):
    """The four 4x4 fixtures with their expected winning pairs (0-based)."""
    out = []
    for fid, row, pair in _NIS4:
        c = CondensedNormalGame(col=list(range(4)), row=list(row), a=a, b=b)
        out.append((from_condensed(c), (tuple(pair[0]), tuple(pair[1]))))
    return out


def nis4_fixture_ids() -> tuple:
    """Fixture ids in the order nis4_fixtures emits them."""
    return tuple(fid for fid, _, _ in _NIS4)


def nis4_condensed(fixture_id: str, a=0, b=1) -> CondensedNormalGame:
    """Condensed form of one fixture, addressed by its id ("1.1", ...)."""
    for fid, row, _ in _NIS4:
        if fid == fixture_id:
            return CondensedNormalGame(col=list(range(4)), row=list(row), a=a, b=b)
    raise InputError(f"unknown nis4 fixture id {fixture_id!r}")


def random_normal(n: int, seed: int, a=0, b=1) -> CondensedNormalGame:
    """Uniform rejection sample over condensed normal games of size n.

    Deterministic for a fixed seed.  n=2 has exactly one normal shape up to
    relabeling; it is returned directly for every seed.
    """
    if n < 2:
        raise InputError("random_normal requires n >= 2")
    if n == 2:
        return CondensedNormalGame([1, 0], [0, 1], a, b)
    rng = np.random.default_rng(seed)
    idx = np.arange(n)
    for _ in range(1000 * n):
        col = rng.integers(0, n, size=n)
        row = rng.integers(0, n, size=n)
        if np.any(col[row] == idx):
            continue
        if len(np.unique(col)) < 2 or len(np.unique(row)) < 2:
            continue
        return CondensedNormalGame(col, row, a, b)
    raise InputError(f"rejection sampling failed after {1000 * n} attempts")
