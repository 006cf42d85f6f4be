"""Linear-time search for winning pairs in condensed normal games.

A *winning pair* is a pair of 2-element index sets ({i1,i2}, {j1,j2}) whose
two 2x2 cost blocks each take one of three shapes — X = [[a,b],[b,a]],
Y = [[b,a],[a,b]], Z = [[b,b],[b,b]] — and whose row/col images on the pair
are non-degenerate: row(j1) != row(j2) and col(i1) != col(i2).  Playing
half-half on the two sides is an equilibrium whenever F(1/2) = b: every
pure response then hits the cheap cell with probability 0, 1/2 or 1, and
the pair shapes cap the opponent-facing probability at 1/2.

The search runs in O(n) array passes and, on random inputs, in O(1)
expected probes: large images are detected greedily and resolved by a
single column scan; the few structured leftovers (images of size <= 3)
fall to an O(1) case analysis after renumbering through index maps.

`scans` counts started array passes so tests can pin the O(n) claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .games import (
    CondensedNormalGame,
    InputError,
    InvariantError,
    MixedStrategy,
    Profile,
)

__all__ = [
    "ColumnWitness",
    "RowPair",
    "WinPairResult",
    "compute_CR",
    "scan_pair",
    "find_winning_pair",
    "validate_winning_pair",
    "pair_to_profile",
    "bench",
]

PAIR = "pair"
FULLY_MIXED_UNIFORM = "fully-mixed-uniform"
SMALL_CASE = "small-case"


@dataclass(frozen=True)
class ColumnWitness:
    """scan_pair exit: the remaining col-values concentrate on <= 3 columns."""

    j: int


@dataclass(frozen=True)
class RowPair:
    """scan_pair exit: {i1,i2} x {j1,j2} is a winning pair."""

    i1: int
    i2: int


@dataclass(frozen=True)
class WinPairResult:
    outcome: str  # PAIR | FULLY_MIXED_UNIFORM | SMALL_CASE
    pair: Optional[tuple[tuple[int, int], tuple[int, int]]]
    scans: int
    n: int

    def to_json(self) -> dict:
        d = {"outcome": self.outcome, "n": self.n, "scans": self.scans}
        if self.pair is not None:
            d["rows"] = list(self.pair[0])
            d["cols"] = list(self.pair[1])
        return d


def compute_CR(c: CondensedNormalGame):
    """Images of col and row as boolean membership arrays (one pass each)."""
    cmask = np.zeros(c.n, dtype=bool)
    cmask[c.col] = True
    rmask = np.zeros(c.n, dtype=bool)
    rmask[c.row] = True
    return cmask, rmask


def _sorted2(x: int, y: int) -> tuple[int, int]:
    return (x, y) if x < y else (y, x)


def scan_pair(c: CondensedNormalGame, j1: int, j2: int):
    """One col-scan given two columns with distinct row-values.

    Returns RowPair(i1, i2) such that {i1,i2} x {j1,j2} is a winning pair
    when one exists along two cheap routes:

    * the special rows {row(j1), row(j2)} themselves (O(1) check: their
      alpha block is always X; the beta off-diagonal must be symmetric and
      their col-values distinct), or
    * two rows outside the special rows whose col-values are distinct and
      avoid {j1, j2} (then both blocks are Z/Y as needed).

    Otherwise every other row's col-value lies in {j1, j2, j} for a single
    column j, returned as ColumnWitness(j).
    """
    col, row = c.col, c.row
    i1, i2 = int(row[j1]), int(row[j2])
    if i1 == i2:
        raise InputError("scan_pair requires row[j1] != row[j2]")
    c1, c2 = int(col[i1]), int(col[i2])
    if c1 != c2 and (c1 == j2) == (c2 == j1):
        return RowPair(*_sorted2(i1, i2))
    first_i = -1
    first_v = -1
    for i in range(c.n):
        if i == i1 or i == i2:
            continue
        v = int(col[i])
        if v == j1 or v == j2:
            continue
        if first_i < 0:
            first_i, first_v = i, v
        elif v != first_v:
            return RowPair(*_sorted2(first_i, i))
    return ColumnWitness(first_v if first_i >= 0 else j1)


def validate_winning_pair(c: CondensedNormalGame, pair) -> bool:
    """Expand the four cells of each block and check the three conditions."""
    try:
        (i1, i2), (j1, j2) = pair
    except (TypeError, ValueError):
        return False
    n = c.n
    if len({i1, i2}) != 2 or len({j1, j2}) != 2:
        return False
    if not all(0 <= t < n for t in (i1, i2, j1, j2)):
        return False
    col, row = c.col, c.row
    if int(row[j1]) == int(row[j2]) or int(col[i1]) == int(col[i2]):
        return False
    alpha = tuple(
        tuple(int(row[j]) == i for j in (j1, j2)) for i in (i1, i2)
    )
    beta = tuple(
        tuple(int(col[i]) == j for j in (j1, j2)) for i in (i1, i2)
    )
    x_form = ((True, False), (False, True))
    y_form = ((False, True), (True, False))
    z_form = ((False, False), (False, False))
    forms = (x_form, y_form, z_form)
    return alpha in forms and beta in forms


def pair_to_profile(pair, n: int) -> Profile:
    """Half-half on each side of the pair, zeros elsewhere."""
    (i1, i2), (j1, j2) = pair
    return Profile(
        MixedStrategy.uniform_on(n, (i1, i2)),
        MixedStrategy.uniform_on(n, (j1, j2)),
    )


# ---------------------------------------------------------------------------
# The O(n) finder
# ---------------------------------------------------------------------------


def _probe_distinct(arr, limit: int = 4):
    """Greedy first-occurrence probe: indices holding the first `limit`
    distinct values of arr; stops early.  Returns (indices, value->index)."""
    seen: dict[int, int] = {}
    picks: list[int] = []
    for t in range(len(arr)):
        v = int(arr[t])
        if v not in seen:
            seen[v] = t
            picks.append(t)
            if len(picks) == limit:
                break
    return picks, seen


def _alg_n5(c: CondensedNormalGame, cols4):
    """Four columns with four distinct row-values -> six scan_pair calls.

    At least one exits with a RowPair for n >= 5: if all six scans ended in
    column witnesses, the witness sets of complementary column pairs would
    force every col-value onto a single column, contradicting |C| >= 2.
    Returns (pair, scan_count).
    """
    scans = 0
    for s in range(4):
        for t in range(s + 1, 4):
            j1, j2 = cols4[s], cols4[t]
            scans += 1
            res = scan_pair(c, j1, j2)
            if isinstance(res, RowPair):
                return ((res.i1, res.i2), _sorted2(j1, j2)), scans
    raise InvariantError("six-scan stage found no winning pair (n >= 5)")


def _smallest_outside(excluded: set) -> int:
    i = 0
    while i in excluded:
        i += 1
    return i


def _case_analysis(col, row, r_set: set, cstar: int):
    """Winning pair when every row outside the row-image shares one col-value.

    Coordinates are the caller's; the renumbering used to derive the cases
    lives only in the branch conditions below (anchors: cstar is the shared
    outside col-value; r0 = row[cstar]; jB = first column with another row
    value; i4 = smallest row outside the row-image).  Proof-order branches:

      dichotomy   {r0,rB} x {cstar,jB}   when the cross as col-values is
                  exactly mutual or fully avoided with distinct values
      (i)  col[r0]=jB, col[rB]=jC off cstar:
             row[jC]=r0 -> {r0,rB} x {jB,jC}   (repaired subcase)
             else       -> {rB,i4} x {cstar,jC}
      (ii) col[rB]=cstar, col[r0]=c2 off jB: four O(1) subcases
      (iii) col[r0]=col[rB]=j -> {rB,i4} x {cstar,j}
    """
    n = len(col)
    r0 = int(row[cstar])
    jB = -1
    for j in range(n):
        if int(row[j]) != r0:
            jB = j
            break
    if jB < 0:
        raise InvariantError("row image collapsed to one value")
    rB = int(row[jB])
    c_r0, c_rB = int(col[r0]), int(col[rB])
    hit_a = c_r0 == jB
    hit_b = c_rB == cstar
    if (hit_a and hit_b) or (not hit_a and not hit_b and c_r0 != c_rB):
        return (_sorted2(r0, rB), _sorted2(cstar, jB))
    if hit_a:  # case (i)
        jC = c_rB
        if int(row[jC]) == r0:
            return (_sorted2(r0, rB), _sorted2(jB, jC))
        i4 = _smallest_outside(r_set)
        return (_sorted2(rB, i4), _sorted2(cstar, jC))
    if not hit_b:  # case (iii): col[r0] == col[rB], both off {cstar, jB}
        if c_r0 != c_rB:
            raise InvariantError("case split fell through")
        i4 = _smallest_outside(r_set)
        return (_sorted2(rB, i4), _sorted2(cstar, c_r0))
    # case (ii): col[rB] == cstar, col[r0] == c2 not in {cstar, jB}
    c2 = c_r0
    r2 = int(row[c2])
    if r2 == rB:
        return (_sorted2(r0, rB), _sorted2(cstar, c2))
    c3 = int(col[r2])
    if c3 == cstar:
        return (_sorted2(r0, r2), _sorted2(cstar, c2))
    if c3 == jB:
        i4 = _smallest_outside(r_set)
        return (_sorted2(r2, i4), _sorted2(cstar, jB))
    return (_sorted2(rB, r2), _sorted2(jB, c2))


# The four canonical |R|=3 leftovers of the 4x4 case (col = identity after
# renumbering) in which no diagonal shift-block wins, with their pairs.
_N4_RESIDUAL = {
    (1, 2, 0, 2): ((1, 2), (0, 3)),
    (2, 0, 1, 2): ((0, 2), (1, 3)),
    (1, 2, 0, 0): ((0, 2), (1, 3)),
    (2, 0, 1, 1): ((0, 3), (0, 3)),
}


def _nis4(col, row, r_set: set):
    """n=4, col a permutation, |image(row)| <= 3: finite case table.

    Renumber rows so the row-image becomes {0..|R|-1} (pi) and columns so
    col becomes the identity (psi[col[i]] = pi[i]); then either a diagonal
    2x2 block {t,t+1} x {t,t+1} wins, or the structure is one of the four
    residual patterns with a named pair.  The pair is mapped back through
    the inverse index maps.
    """
    order = sorted(r_set) + sorted(set(range(4)) - r_set)
    pi = {old: new for new, old in enumerate(order)}
    pi_inv = {new: old for old, new in pi.items()}
    psi = {int(col[i]): pi[i] for i in range(4)}
    psi_inv = {new: old for old, new in psi.items()}
    row_c = [0] * 4
    for j in range(4):
        row_c[psi[j]] = pi[int(row[j])]
    if len(r_set) == 2:
        pair_c = ((2, 3), (0, 1))  # all-Z blocks regardless of row_c[2..3]
    else:
        pair_c = None
        for t in range(3):
            u, w = row_c[t], row_c[t + 1]
            if (u == t + 1) == (w == t) and u != w:
                pair_c = ((t, t + 1), (t, t + 1))
                break
        if pair_c is None:
            pair_c = _N4_RESIDUAL.get(tuple(row_c))
        if pair_c is None:
            raise InvariantError(f"unmatched 4x4 residual structure {row_c}")
    rows = _sorted2(pi_inv[pair_c[0][0]], pi_inv[pair_c[0][1]])
    cols = _sorted2(psi_inv[pair_c[1][0]], psi_inv[pair_c[1][1]])
    return rows, cols


def find_winning_pair(c: CondensedNormalGame) -> WinPairResult:
    """Dispatch on n and the image sizes; O(n) worst case, O(1) expected.

    Precedence when several routes apply: the six-scan stage (n >= 5 with a
    4-element image), then the outside-image pair route, then the 4x4 case
    table, then the structured case analysis.
    """
    n = c.n
    col, row = c.col, c.row
    scans = 0
    if n <= 3:
        return WinPairResult(SMALL_CASE, None, scans, n)

    if n == 4:
        scans += 2
        c_set = {int(v) for v in col}
        r_set = {int(v) for v in row}
        if len(c_set) == 4 and len(r_set) == 4:
            return WinPairResult(FULLY_MIXED_UNIFORM, None, scans, n)
        if len(c_set) == 4:
            scans += 1
            pair = _nis4(col, row, r_set)
        elif len(r_set) == 4:
            scans += 1
            rows, cols = _nis4(row, col, c_set)  # players swapped
            pair = (cols, rows)
        else:
            pair, extra = _small_images(col, row, c_set, r_set)
            scans += extra
        res = WinPairResult(PAIR, pair, scans, n)
    else:
        scans += 1
        picks_r, seen_r = _probe_distinct(row)
        if len(picks_r) == 4:
            pair, extra = _alg_n5(c, picks_r)
            return WinPairResult(PAIR, pair, scans + extra, n)
        r_set = set(seen_r)
        scans += 1
        picks_c, seen_c = _probe_distinct(col)
        if len(picks_c) == 4:
            swapped = CondensedNormalGame(row, col, c.a, c.b)
            (rows, cols), extra = _alg_n5(swapped, picks_c)
            return WinPairResult(PAIR, (cols, rows), scans + extra, n)
        c_set = set(seen_c)
        pair, extra = _small_images(col, row, c_set, r_set)
        res = WinPairResult(PAIR, pair, scans + extra, n)

    if not validate_winning_pair(c, res.pair):
        raise InvariantError(f"constructed pair {res.pair} failed validation")
    return res


def _small_images(col, row, c_set: set, r_set: set):
    """|C| <= 3 and |R| <= 3: outside-image witnesses or case analysis.

    Returns (pair, scans).  One pass collects up to two rows outside the
    row-image with distinct col-values; one pass the column-side mirror.
    Two hits on both sides give a winning pair outright (all-Z blocks);
    a single shared value routes into the theorem's case analysis, with the
    players swapped when only the column side collapses.
    """
    n = len(col)
    scans = 2
    out_rows: list[int] = []  # i outside R, distinct col-values
    vals_c: set[int] = set()
    for i in range(n):
        if i in r_set:
            continue
        v = int(col[i])
        if v not in vals_c:
            vals_c.add(v)
            out_rows.append(i)
            if len(out_rows) == 2:
                break
    out_cols: list[int] = []
    vals_r: set[int] = set()
    for j in range(n):
        if j in c_set:
            continue
        v = int(row[j])
        if v not in vals_r:
            vals_r.add(v)
            out_cols.append(j)
            if len(out_cols) == 2:
                break
    if len(out_rows) == 2 and len(out_cols) == 2:
        return (_sorted2(*out_rows), _sorted2(*out_cols)), scans
    if len(out_rows) == 1:
        scans += 1
        return _case_analysis(col, row, r_set, int(col[out_rows[0]])), scans
    # column side collapsed: run the case analysis on the swapped game
    scans += 1
    rows, cols = _case_analysis(row, col, c_set, int(row[out_cols[0]]))
    return (cols, rows), scans


# ---------------------------------------------------------------------------
# Benchmark harness (plot-ready rows for the CLI and the acceptance test)
# ---------------------------------------------------------------------------


def bench(nmin: int = 2**14, nmax: int = 2**20, seeds: int = 5, repeats: int = 5):
    """Time find_winning_pair on random normal games.

    Yields (n, seed, nanos, scans) rows; `nanos` is the best of `repeats`
    calls (robust against scheduler noise at microsecond scales).
    """
    import time

    from .families import random_normal

    n = nmin
    rows = []
    while n <= nmax:
        for seed in range(seeds):
            g = random_normal(n, seed)
            best = None
            scans = 0
            for _ in range(repeats):
                t0 = time.perf_counter_ns()
                res = find_winning_pair(g)
                dt = time.perf_counter_ns() - t0
                best = dt if best is None else min(best, dt)
                scans = res.scans
            rows.append((n, seed, best, scans))
        n *= 2
    return rows
