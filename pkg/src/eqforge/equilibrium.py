"""Equilibrium verification, search, and non-existence certification.

Players minimize a valuation F of their cheap-cost probability x (see
`valuations`).  Because every supported F is concave in x and x is linear
in the player's own mixing weights, a profitable deviation exists iff a
profitable *pure* deviation exists; all verifiers therefore check pure
deviations only.

Three layers live here:

* verifiers — exact Fraction arithmetic whenever the valuation admits it,
  a banded tolerance otherwise, plus the equal-payoff-on-support predicate;
* solvers — exact support enumeration for expectation equilibria (vertex
  enumeration of the per-player best-response polytopes), a constructive
  pipeline turning a 3x3 expectation equilibrium into an F-equilibrium
  when F(1/2) <= b, and a staged `find_F_equilibrium` front end;
* the certifier — interval branch-and-bound over profile boxes proving
  that no profile is an eps-approximate F-equilibrium.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from .games import (
    Game,
    InputError,
    InvariantError,
    MixedStrategy,
    Profile,
    TwoValuesGame,
    derive_pure_from_singleton,
    expectation,
    is_E_equilibrium,
    is_normal,
    pure_equilibria,
    rational,
    to_condensed,
    x_value,
)
from .valuations import (
    HalfClass,
    OneParamValuation,
    classify_half,
    cost_distribution,
    eval_F,
    x0_of,
)

__all__ = [
    "EQUILIBRIUM",
    "NOT_EQUILIBRIUM",
    "DeviationWitness",
    "EquilibriumReport",
    "NonExistenceCertificate",
    "FEquilibrium",
    "best_response_cost",
    "verify_E_equilibrium",
    "verify_F_equilibrium",
    "verify_general_equilibrium",
    "weep_holds",
    "solve_E_support_enumeration",
    "iter_E_equilibria",
    "three_strategy_F_equilibrium",
    "find_F_equilibrium",
    "certify_no_F_equilibrium",
    "atlas_3x3",
]

EQUILIBRIUM = "Equilibrium"
NOT_EQUILIBRIUM = "NotEquilibrium"
CERTIFIED = "Certified"
UNDECIDED = "Undecided"


def _num_json(x):
    if isinstance(x, Fraction):
        return str(x)
    if x is None:
        return None
    return float(x)


@dataclass(frozen=True)
class DeviationWitness:
    """A profitable pure deviation: player's value drops from old to new."""

    player: int  # 1 or 2
    strategy: int  # 0-based pure strategy index
    old: object
    new: object

    def to_json(self) -> dict:
        return {
            "player": self.player,
            "strategy": self.strategy,
            "old": _num_json(self.old),
            "new": _num_json(self.new),
        }


@dataclass(frozen=True)
class EquilibriumReport:
    verdict: str  # EQUILIBRIUM | NOT_EQUILIBRIUM
    witness: Optional[DeviationWitness] = None
    weep: Optional[tuple] = None  # ((holds1, holds2), (value1, value2))

    @property
    def is_equilibrium(self) -> bool:
        return self.verdict == EQUILIBRIUM

    def to_json(self) -> dict:
        weep = None
        if self.weep is not None:
            holds, values = self.weep
            weep = {
                "holds": list(holds),
                "values": [_num_json(v) for v in values],
            }
        return {
            "verdict": self.verdict,
            "witness": self.witness.to_json() if self.witness else None,
            "weep": weep,
        }


@dataclass(frozen=True)
class NonExistenceCertificate:
    verdict: str  # CERTIFIED | UNDECIDED
    epsilon: Fraction
    explored_boxes: int
    max_depth_reached: int
    depth_histogram: dict = field(default_factory=dict, compare=False)

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "epsilon": str(self.epsilon),
            "explored_boxes": self.explored_boxes,
            "max_depth_reached": self.max_depth_reached,
            "depth_histogram": {
                str(k): v for k, v in sorted(self.depth_histogram.items())
            },
        }


# ---------------------------------------------------------------------------
# Verifiers
# ---------------------------------------------------------------------------


def _default_tol(v: OneParamValuation) -> float:
    return 1e-9 * float(v.b - v.a)


def _improves(new, old, v: OneParamValuation, tol: Optional[float]) -> bool:
    """Is `new` strictly better (smaller) than `old` for a minimizer?"""
    if isinstance(new, Fraction) and isinstance(old, Fraction):
        return new < old
    band = _default_tol(v) if tol is None else tol
    return float(new) < float(old) - band


def weep_holds(g: TwoValuesGame, prof: Profile):
    """Equal-expected-payoff-on-support, per player.

    Returns ((holds1, holds2), (value1, value2)) where value_k is the
    common expected cost over player k's support when it holds, else None.
    """
    out_holds = []
    out_vals = []
    for k, (own, opp) in enumerate(
        ((prof.p1, prof.p2), (prof.p2, prof.p1)), start=1
    ):
        vals = set()
        for i in own.support():
            pure = MixedStrategy.pure(len(own), i)
            pp = Profile(pure, opp) if k == 1 else Profile(opp, pure)
            vals.add(expectation(g.game, k, pp))
        holds = len(vals) == 1
        out_holds.append(holds)
        out_vals.append(next(iter(vals)) if holds else None)
    return (tuple(out_holds), tuple(out_vals))


def _pure_profile(n1: int, n2: int, k: int, i: int, opp) -> Profile:
    if k == 1:
        return Profile(MixedStrategy.pure(n1, i), opp)
    return Profile(opp, MixedStrategy.pure(n2, i))


def best_response_cost(
    g: TwoValuesGame, k: int, v: OneParamValuation, opp: MixedStrategy
):
    """Least achievable valuation for player k against a fixed opponent.

    Concavity of F makes the minimum over the own-strategy simplex sit at
    a pure strategy, so this is a min over pure rows/columns.
    """
    if not v.concave:
        raise InputError("best_response_cost requires a concave valuation")
    n_own = g.n1 if k == 1 else g.n2
    best = None
    for i in range(n_own):
        prof = _pure_profile(g.n1, g.n2, k, i, opp)
        val = eval_F(v, x_value(g, k, prof))
        if best is None or _lt(val, best):
            best = val
    return best


def _lt(x, y) -> bool:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x < y
    return float(x) < float(y)


def verify_F_equilibrium(
    g: TwoValuesGame,
    v: OneParamValuation,
    prof: Profile,
    tol: Optional[float] = None,
) -> EquilibriumReport:
    """Pure-deviation check of F(x_k); exact when the valuation is exact.

    A deviation counts only if it beats the current value by more than the
    tolerance (ignored for exact valuations evaluated at rational x).
    """
    if len(prof.p1) != g.n1 or len(prof.p2) != g.n2:
        raise InputError("profile shape does not match the game")
    witness = None
    for k in (1, 2):
        own = prof.p1 if k == 1 else prof.p2
        opp = prof.p2 if k == 1 else prof.p1
        cur = eval_F(v, x_value(g, k, prof))
        for i in range(len(own)):
            dev = eval_F(v, x_value(g, k, _pure_profile(g.n1, g.n2, k, i, opp)))
            if _improves(dev, cur, v, tol):
                witness = DeviationWitness(k, i, cur, dev)
                return EquilibriumReport(
                    NOT_EQUILIBRIUM, witness, weep_holds(g, prof)
                )
    return EquilibriumReport(EQUILIBRIUM, None, weep_holds(g, prof))


def verify_E_equilibrium(g: TwoValuesGame, prof: Profile) -> EquilibriumReport:
    """Exact expected-cost equilibrium check with a deviation witness."""
    if len(prof.p1) != g.n1 or len(prof.p2) != g.n2:
        raise InputError("profile shape does not match the game")
    for k in (1, 2):
        own = prof.p1 if k == 1 else prof.p2
        opp = prof.p2 if k == 1 else prof.p1
        cur = expectation(g.game, k, prof)
        for i in range(len(own)):
            dev = expectation(g.game, k, _pure_profile(g.n1, g.n2, k, i, opp))
            if dev < cur:
                return EquilibriumReport(
                    NOT_EQUILIBRIUM,
                    DeviationWitness(k, i, cur, dev),
                    weep_holds(g, prof),
                )
    return EquilibriumReport(EQUILIBRIUM, None, weep_holds(g, prof))


def verify_general_equilibrium(
    g: Game,
    valuation_fn: Callable[[Sequence[Fraction], Sequence[Fraction]], object],
    prof: Profile,
    tol: float = 0.0,
) -> EquilibriumReport:
    """Equilibrium check for a distribution valuation on an arbitrary game.

    `valuation_fn(values, probs)` maps a cost distribution to a number and
    must be concave under mixtures of distributions (true for expectations
    and tail averages); then pure deviations again suffice.
    """
    witness = None
    for k in (1, 2):
        own = prof.p1 if k == 1 else prof.p2
        opp = prof.p2 if k == 1 else prof.p1
        vals, probs = cost_distribution(g, k, prof)
        cur = valuation_fn(vals, probs)
        n1 = g.n1
        n2 = g.n2
        for i in range(len(own)):
            pp = _pure_profile(n1, n2, k, i, opp)
            dvals, dprobs = cost_distribution(g, k, pp)
            dev = valuation_fn(dvals, dprobs)
            if isinstance(dev, Fraction) and isinstance(cur, Fraction) and tol == 0:
                better = dev < cur
            else:
                better = float(dev) < float(cur) - tol
            if better:
                witness = DeviationWitness(k, i, cur, dev)
                return EquilibriumReport(NOT_EQUILIBRIUM, witness, None)
    return EquilibriumReport(EQUILIBRIUM, None, None)


# ---------------------------------------------------------------------------
# Exact linear algebra (Fractions)
# ---------------------------------------------------------------------------


def _solve_unique(rows, rhs, dim):
    """Unique solution of rows . x = rhs over Fractions, else None."""
    m = [list(r) + [rh] for r, rh in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(dim):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = m[r][c]
        m[r] = [t / inv for t in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [ti - f * tr for ti, tr in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(m)):
        if m[i][dim] != 0 and all(m[i][c] == 0 for c in range(dim)):
            return None
    if r < dim:
        return None
    x = [Fraction(0)] * dim
    for k, c in enumerate(piv_cols):
        x[c] = m[k][dim]
    return x


def _rank(rows, dim) -> int:
    m = [list(r) for r in rows]
    r = 0
    for c in range(dim):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [ti - f * tr for ti, tr in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def _dot(c, x):
    return sum(ci * xi for ci, xi in zip(c, x))


def _polytope_vertices(eqs, ineqs, dim):
    """Vertices of {x : eq rows hold, ineq rows . x >= rhs}, exact.

    Brute-force over tight inequality subsets completing the equality rank
    to `dim`; fine for the dimensions used here (<= 6).
    """
    eq_rows = [e[0] for e in eqs]
    eq_rhs = [e[1] for e in eqs]
    need = dim - _rank(eq_rows, dim)
    verts = set()
    if need < 0:
        need = 0
    for tight in itertools.combinations(range(len(ineqs)), need):
        rows = eq_rows + [ineqs[t][0] for t in tight]
        rhs = eq_rhs + [ineqs[t][1] for t in tight]
        sol = _solve_unique(rows, rhs, dim)
        if sol is None:
            continue
        if all(_dot(c, sol) >= r for c, r in ineqs):
            verts.add(tuple(sol))
    return sorted(verts)


# ---------------------------------------------------------------------------
# Expectation equilibria by support enumeration
# ---------------------------------------------------------------------------


def _support_pairs(n1: int, n2: int):
    subs1 = [
        s
        for size in range(1, n1 + 1)
        for s in itertools.combinations(range(n1), size)
    ]
    subs2 = [
        s
        for size in range(1, n2 + 1)
        for s in itertools.combinations(range(n2), size)
    ]
    pairs = [(s1, s2) for s1 in subs1 for s2 in subs2]
    pairs.sort(key=lambda p: (len(p[0]) + len(p[1]), len(p[0]), p[0], p[1]))
    return pairs


def _unit(dim, j):
    row = [Fraction(0)] * dim
    row[j] = Fraction(1)
    return tuple(row)


def _response_polytope(cost, own_support, opp_support, dim, outside_ineqs):
    """Opponent-mixing polytope keeping `own_support` optimal.

    cost[i][j]: the responding player's cost matrix with own index first.
    Equalities: zero mass off opp_support, total mass one, indifference of
    own_support rows; inequalities: nonnegativity on opp_support and (when
    `outside_ineqs`) weak dominance of the support rows over the rest.
    """
    i0 = own_support[0]
    eqs = [(_unit(dim, j), Fraction(0)) for j in range(dim) if j not in opp_support]
    eqs.append((tuple(Fraction(1) for _ in range(dim)), Fraction(1)))
    for i in own_support[1:]:
        eqs.append(
            (
                tuple(cost[i][j] - cost[i0][j] for j in range(dim)),
                Fraction(0),
            )
        )
    ineqs = [(_unit(dim, j), Fraction(0)) for j in opp_support]
    if outside_ineqs:
        own_set = set(own_support)
        for i in range(len(cost)):
            if i in own_set:
                continue
            ineqs.append(
                (
                    tuple(cost[i][j] - cost[i0][j] for j in range(dim)),
                    Fraction(0),
                )
            )
    return _polytope_vertices(eqs, ineqs, dim)


def iter_E_equilibria(g: TwoValuesGame) -> Iterator[Profile]:
    """Extreme expectation equilibria in a deterministic order.

    Support pairs ascend by total size; per pair, the two best-response
    polytopes decouple and their vertex products are emitted after an exact
    equilibrium re-check.  Profiles repeat across nested support pairs only
    once (first occurrence wins).
    """
    mu1 = g.mu1
    mu2t = tuple(tuple(g.mu2[i][j] for i in range(g.n1)) for j in range(g.n2))
    seen = set()
    for s1, s2 in _support_pairs(g.n1, g.n2):
        p2_verts = _response_polytope(mu1, s1, s2, g.n2, outside_ineqs=True)
        if not p2_verts:
            continue
        p1_verts = _response_polytope(mu2t, s2, s1, g.n1, outside_ineqs=True)
        for p1 in p1_verts:
            for p2 in p2_verts:
                key = (p1, p2)
                if key in seen:
                    continue
                seen.add(key)
                prof = Profile(MixedStrategy(p1), MixedStrategy(p2))
                if is_E_equilibrium(g, prof):
                    yield prof


def solve_E_support_enumeration(g: TwoValuesGame, max_n: int = 5):
    """All extreme expectation equilibria of a small game, ordered."""
    if max(g.n1, g.n2) > max_n:
        raise InputError(
            f"support enumeration limited to {max_n} strategies per player"
        )
    return list(iter_E_equilibria(g))


# ---------------------------------------------------------------------------
# 3x3 constructive pipeline
# ---------------------------------------------------------------------------


def _uniform_on(n, support):
    return MixedStrategy.uniform_on(n, support)


def _transpose_game(g: TwoValuesGame) -> TwoValuesGame:
    n1, n2 = g.n1, g.n2
    mu1 = tuple(tuple(g.mu2[i][j] for i in range(n1)) for j in range(n2))
    mu2 = tuple(tuple(g.mu1[i][j] for i in range(n1)) for j in range(n2))
    return TwoValuesGame(Game(mu1, mu2), g.a, g.b)


def _three_strategy_candidates(g: TwoValuesGame, v: OneParamValuation, prof: Profile):
    """Candidate F-equilibria derived from one expectation equilibrium."""
    s1 = prof.p1.support()
    s2 = prof.p2.support()
    if len(s1) == 1 or len(s2) == 1:
        return [derive_pure_from_singleton(g, prof)]
    if len(s1) == 3 and len(s2) == 3:
        return [prof]
    if len(s2) == 2:
        return _two_support_candidates(g, v, prof, s1, s2)
    # len(s1) == 2, len(s2) == 3: run the mirror image through a transpose
    g_t = _transpose_game(g)
    cands = _two_support_candidates(
        g_t, v, Profile(prof.p2, prof.p1), s2, s1
    )
    return [Profile(c.p2, c.p1) for c in cands]


def _two_support_candidates(g, v, prof, s1, s2):
    """|support(p2)| == 2: half-half the column side, then repair the rows.

    The half-half move preserves the expectation equilibrium (checked, not
    assumed); the row-side repairs below keep the column side indifferent
    while pushing the row mix to a point whose F-value survives pure
    deviations.  Every candidate is re-verified by the caller.
    """
    p2h = _uniform_on(3, s2)
    prof2 = Profile(prof.p1, p2h)
    if not is_E_equilibrium(g, prof2):
        return []
    if len(s1) == 2:
        prof3 = Profile(_uniform_on(3, s1), p2h)
        if not is_E_equilibrium(g, prof3):
            return [prof2]
        return [prof3, prof2]
    # full row support against a half-half column pair
    j1, j2 = sorted(s2)
    (j3,) = set(range(3)) - {j1, j2}
    a = g.a
    col1 = tuple(g.mu2[i][j1] for i in range(3))
    col2 = tuple(g.mu2[i][j2] for i in range(3))
    cands = []
    if col1 == col2:
        cheap = [i for i in range(3) if col1[i] == a]
        if len(cheap) == 2:
            cands.append(Profile(MixedStrategy.uniform(3), p2h))
        elif len(cheap) == 1 and g.mu2[cheap[0]][j3] != a:
            i_a = cheap[0]
            w = tuple(
                Fraction(1, 2) if i == i_a else Fraction(1, 4) for i in range(3)
            )
            cands.append(Profile(MixedStrategy(w), p2h))
    else:
        kinds = {"aa": [], "ab": [], "ba": [], "bb": []}
        for i in range(3):
            key = ("a" if col1[i] == a else "b") + ("a" if col2[i] == a else "b")
            kinds[key].append(i)
        if kinds["aa"]:
            cands.append(Profile(MixedStrategy.uniform(3), p2h))
        elif kinds["bb"] and kinds["ab"] and kinds["ba"]:
            third_col_cheap = sum(1 for i in range(3) if g.mu2[i][j3] == a)
            f_third = eval_F(v, Fraction(1, 3))
            b_val = v.b
            third_ok = (
                f_third <= b_val
                if isinstance(f_third, Fraction)
                else float(f_third) <= float(b_val) + _default_tol(v)
            )
            if third_col_cheap == 1 or third_ok:
                cands.append(Profile(MixedStrategy.uniform(3), p2h))
            else:
                w = [Fraction(0)] * 3
                w[kinds["ab"][0]] = Fraction(1, 2)
                w[kinds["ba"][0]] = Fraction(1, 2)
                cands.append(Profile(MixedStrategy(tuple(w)), p2h))
    cands.append(prof2)
    return cands


def three_strategy_F_equilibrium(
    g: TwoValuesGame, v: OneParamValuation, tol: Optional[float] = None
) -> Profile:
    """F-equilibrium of a 3x3 game whenever F(1/2) <= b.

    Walks the extreme expectation equilibria in order and transforms each
    (pure derivation, half-half normalization, or a row-side repair) into
    a candidate that is then verified; the first verified candidate wins.
    """
    if g.n1 != 3 or g.n2 != 3:
        raise InputError("three_strategy_F_equilibrium needs a 3x3 game")
    if classify_half(v) == HalfClass.GREATER:
        raise InputError("three_strategy_F_equilibrium needs F(1/2) <= b")
    for e_eq in iter_E_equilibria(g):
        for cand in _three_strategy_candidates(g, v, e_eq):
            if verify_F_equilibrium(g, v, cand, tol).is_equilibrium:
                return cand
    raise InvariantError(
        "no extreme expectation equilibrium transformed into an F-equilibrium"
    )


# ---------------------------------------------------------------------------
# Staged search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FEquilibrium:
    profile: Profile
    method: str
    report: EquilibriumReport

    def to_json(self) -> dict:
        from .games import profile_to_json

        return {
            "profile": profile_to_json(self.profile),
            "method": self.method,
            "report": self.report.to_json(),
        }


def _family_candidates(g: TwoValuesGame):
    """Known-equilibrium candidates when g matches a generated family."""
    from .families import gen_C, gen_D, known_equilibrium

    out = []
    if g.n1 != g.n2:
        return out
    n = g.n1
    if gen_D(n, g.a, g.b) == g:
        m = n
        out.append(known_equilibrium("D", m, "uniform"))
        if m % 2 == 0:
            out.append(known_equilibrium("D", m, "even-split"))
        if m >= 4:
            out.append(known_equilibrium("D", m, "odd-block"))
    if n >= 3 and gen_C(n - 1, g.a, g.b) == g:
        m = n - 1
        out.append(known_equilibrium("C", m, "uniform"))
        if m % 2 == 0:
            out.append(known_equilibrium("C", m, "C-even"))
        if m % 2 == 1 and m >= 3:
            out.append(known_equilibrium("C", m, "C-odd-equal"))
            out.append(known_equilibrium("C", m, "C-odd-geq"))
    return out


def find_F_equilibrium(
    g: TwoValuesGame,
    v: OneParamValuation,
    tol: Optional[float] = None,
    max_enum_n: int = 5,
) -> Optional[FEquilibrium]:
    """Staged heuristic search; a None result does not prove non-existence.

    Stages: pure equilibria; winning pair / fully-mixed-uniform on normal
    games when F(1/2) = b; the 3x3 pipeline when F(1/2) <= b; the uniform
    profile; known family equilibria; equal-payoff vertex candidates by
    support enumeration on games with at most `max_enum_n` strategies.
    """

    def won(prof: Profile, method: str) -> FEquilibrium:
        rep = verify_F_equilibrium(g, v, prof, tol)
        if not rep.is_equilibrium:
            raise InvariantError(f"stage {method} produced a non-equilibrium")
        return FEquilibrium(prof, method, rep)

    pures = pure_equilibria(g)
    if pures:
        return won(pures[0], "pure")

    if g.n1 == g.n2 and classify_half(v) == HalfClass.EQUAL and is_normal(g):
        from .winpair import (
            FULLY_MIXED_UNIFORM,
            PAIR,
            find_winning_pair,
            pair_to_profile,
        )

        wp = find_winning_pair(to_condensed(g))
        if wp.outcome == PAIR:
            return won(pair_to_profile(wp.pair, g.n1), "winning-pair")
        if wp.outcome == FULLY_MIXED_UNIFORM:
            n = g.n1
            return won(
                Profile(MixedStrategy.uniform(n), MixedStrategy.uniform(n)),
                "fully-mixed-uniform",
            )

    if g.n1 == 3 and g.n2 == 3 and classify_half(v) != HalfClass.GREATER:
        try:
            prof = three_strategy_F_equilibrium(g, v, tol)
            return FEquilibrium(
                prof, "three-strategy", verify_F_equilibrium(g, v, prof, tol)
            )
        except InvariantError:
            pass

    uni = Profile(MixedStrategy.uniform(g.n1), MixedStrategy.uniform(g.n2))
    rep = verify_F_equilibrium(g, v, uni, tol)
    if rep.is_equilibrium:
        return FEquilibrium(uni, "uniform", rep)

    for cand in _family_candidates(g):
        rep = verify_F_equilibrium(g, v, cand, tol)
        if rep.is_equilibrium:
            return FEquilibrium(cand, "family", rep)

    if max(g.n1, g.n2) <= max_enum_n:
        mu1 = g.mu1
        mu2t = tuple(
            tuple(g.mu2[i][j] for i in range(g.n1)) for j in range(g.n2)
        )
        seen = set()
        for s1, s2 in _support_pairs(g.n1, g.n2):
            cands = []
            p2_verts = _response_polytope(mu1, s1, s2, g.n2, outside_ineqs=False)
            p1_verts = _response_polytope(
                mu2t, s2, s1, g.n1, outside_ineqs=False
            )
            for p1 in p1_verts:
                for p2 in p2_verts:
                    cands.append((p1, p2))
            cands.append(
                (
                    tuple(_uniform_on(g.n1, s1)),
                    tuple(_uniform_on(g.n2, s2)),
                )
            )
            for p1, p2 in cands:
                if (p1, p2) in seen:
                    continue
                seen.add((p1, p2))
                prof = Profile(MixedStrategy(p1), MixedStrategy(p2))
                rep = verify_F_equilibrium(g, v, prof, tol)
                if rep.is_equilibrium:
                    return FEquilibrium(prof, "support-enumeration", rep)
    return None


# ---------------------------------------------------------------------------
# Non-existence certification (interval branch-and-bound)
# ---------------------------------------------------------------------------

def _knap_pair(active, lo, hi):
    """(min, max) of the active-coordinate mass over the clipped box."""
    lo_val = _mass_extreme(active, lo, hi, maximize=False)
    hi_val = _mass_extreme(active, lo, hi, maximize=True)
    if lo_val is None or hi_val is None:
        return None
    return lo_val, hi_val


def _mass_extreme(active, lo, hi, maximize):
    n = len(lo)
    rem = Fraction(1) - sum(lo)
    if rem < 0:
        return None
    val = sum(lo[j] for j in range(n) if active[j])
    order = [j for j in range(n) if active[j] == maximize]
    order += [j for j in range(n) if active[j] != maximize]
    for j in order:
        if rem <= 0:
            break
        add = min(hi[j] - lo[j], rem)
        if active[j]:
            val += add
        rem -= add
    if rem > 0:
        return None
    return val


def _weighted_extreme(weights, lo, hi, maximize):
    """Extreme of sum(w_j q_j) over the box-clipped simplex (exact)."""
    rem = Fraction(1) - sum(lo)
    if rem < 0:
        return None
    val = _dot(weights, lo)
    order = sorted(range(len(lo)), key=lambda j: weights[j], reverse=maximize)
    for j in order:
        if rem <= 0:
            break
        add = min(hi[j] - lo[j], rem)
        val += weights[j] * add
        rem -= add
    if rem > 0:
        return None
    return val


def _clip_box(lo, hi):
    """Tighten a box against the simplex; None if infeasible."""
    n = len(lo)
    lo = list(lo)
    hi = list(hi)
    total_lo = sum(lo)
    total_hi = sum(hi)
    if total_lo > 1 or total_hi < 1:
        return None
    for j in range(n):
        floor_j = Fraction(1) - (total_hi - hi[j])
        ceil_j = Fraction(1) - (total_lo - lo[j])
        if floor_j > lo[j]:
            lo[j] = floor_j
        if ceil_j < hi[j]:
            hi[j] = ceil_j
        if lo[j] > hi[j]:
            return None
    return tuple(lo), tuple(hi)


def _f_bounds(v, xlo, xhi, pad):
    """Sound (min, max) of F over x in [xlo, xhi]; concavity gives both."""
    x0 = x0_of(v)
    xm = xlo if x0 <= xlo else (xhi if x0 >= xhi else x0)
    flo_candidates = (eval_F(v, xlo), eval_F(v, xhi))
    fmax = eval_F(v, xm)
    if v.exact and v.kind != "esd":
        return min(flo_candidates), fmax
    lo = min(float(t) for t in flo_candidates) - pad
    hi = float(fmax) + pad
    return Fraction(lo), Fraction(hi)


def certify_no_F_equilibrium(
    g: TwoValuesGame,
    v: OneParamValuation,
    eps=Fraction(1, 10**6),
    max_depth: int = 40,
) -> NonExistenceCertificate:
    """Prove no profile is an eps-approximate F-equilibrium, or give up.

    Interval branch-and-bound on boxes of mixing weights: a box dies when
    one player has one pure deviation whose worst-case value still beats
    every in-box current value by more than eps.  Exact arithmetic except
    for a symmetric padding of square-root valuations.
    """
    eps = rational(eps)
    a_cells = []
    for k in (1, 2):
        mu = g.mu1 if k == 1 else g.mu2
        a_cells.append(
            tuple(
                tuple(mu[i][j] == g.a for j in range(g.n2)) for i in range(g.n1)
            )
        )
    pad = 0.0 if (v.exact and v.kind != "esd") else 1e-9 * float(v.b - v.a)

    n1, n2 = g.n1, g.n2
    full1 = (tuple(Fraction(0) for _ in range(n1)), tuple(Fraction(1) for _ in range(n1)))
    full2 = (tuple(Fraction(0) for _ in range(n2)), tuple(Fraction(1) for _ in range(n2)))
    root = (_clip_box(*full1), _clip_box(*full2), 0)
    stack = [root]
    explored = 0
    max_seen = 0
    hist: dict[int, int] = {}

    while stack:
        box1, box2, depth = stack.pop()
        explored += 1
        hist[depth] = hist.get(depth, 0) + 1
        if depth > max_seen:
            max_seen = depth
        if box1 is None or box2 is None:
            continue
        if _box_refuted(g, v, a_cells, box1, box2, eps, pad):
            continue
        if depth >= max_depth:
            return NonExistenceCertificate(
                UNDECIDED, eps, explored, max_seen, hist
            )
        kid1a, kid1b, kid2a, kid2b = _split(box1, box2)
        if kid2a is None:
            stack.append((kid1a, box2, depth + 1))
            stack.append((kid1b, box2, depth + 1))
        else:
            stack.append((box1, kid2a, depth + 1))
            stack.append((box1, kid2b, depth + 1))
    return NonExistenceCertificate(CERTIFIED, eps, explored, max_seen, hist)


def _box_refuted(g, v, a_cells, box1, box2, eps, pad) -> bool:
    """Does some fixed pure deviation beat every profile in the box?"""
    for k in (1, 2):
        cells = a_cells[k - 1]
        own_box, opp_box = (box1, box2) if k == 1 else (box2, box1)
        n_own = g.n1 if k == 1 else g.n2
        n_opp = g.n2 if k == 1 else g.n1

        # current-x interval via nested linear bounds
        w_hi = []
        w_lo = []
        for jo in range(n_opp):
            col = tuple(
                (cells[i][jo] if k == 1 else cells[jo][i]) for i in range(n_own)
            )
            pair = _knap_pair(col, own_box[0], own_box[1])
            if pair is None:
                return True  # infeasible box
            w_lo.append(pair[0])
            w_hi.append(pair[1])
        x_cur_lo = _weighted_extreme(w_lo, opp_box[0], opp_box[1], maximize=False)
        x_cur_hi = _weighted_extreme(w_hi, opp_box[0], opp_box[1], maximize=True)
        if x_cur_lo is None or x_cur_hi is None:
            return True
        f_cur_min, _ = _f_bounds(v, x_cur_lo, x_cur_hi, pad)

        for i in range(n_own):
            row = tuple(
                (cells[i][jo] if k == 1 else cells[jo][i]) for jo in range(n_opp)
            )
            pair = _knap_pair(row, opp_box[0], opp_box[1])
            if pair is None:
                return True
            _, f_dev_max = _f_bounds(v, pair[0], pair[1], pad)
            if f_dev_max < f_cur_min - eps:
                return True
    return False


def _split(box1, box2):
    """Split the widest coordinate of the wider box (ties: player 1)."""

    def widest(box):
        lo, hi = box
        w, j = max(((hi[t] - lo[t]), -t) for t in range(len(lo)))
        return w, -j

    w1, j1 = widest(box1)
    w2, j2 = widest(box2)
    if w1 >= w2:
        lo, hi = box1
        mid = (lo[j1] + hi[j1]) / 2
        lo_a, hi_a = list(lo), list(hi)
        hi_a[j1] = mid
        lo_b, hi_b = list(lo), list(hi)
        lo_b[j1] = mid
        return (
            _clip_box(tuple(lo_a), tuple(hi_a)),
            _clip_box(tuple(lo_b), tuple(hi_b)),
            None,
            None,
        )
    lo, hi = box2
    mid = (lo[j2] + hi[j2]) / 2
    lo_a, hi_a = list(lo), list(hi)
    hi_a[j2] = mid
    lo_b, hi_b = list(lo), list(hi)
    lo_b[j2] = mid
    return (
        None,
        None,
        _clip_box(tuple(lo_a), tuple(hi_a)),
        _clip_box(tuple(lo_b), tuple(hi_b)),
    )


# ---------------------------------------------------------------------------
# 3x3 atlas sweep
# ---------------------------------------------------------------------------


def _atlas_masks(alphabet, a):
    m1 = tuple(pair[0] == a for pair in alphabet)
    m2 = tuple(pair[1] == a for pair in alphabet)
    return m1, m2


def _digits9(gid: int):
    d = []
    for _ in range(9):
        d.append(gid & 3)
        gid >>= 2
    return d  # cell (i, j) at index 3*i + j


def _has_pure_eq(d, m1, m2) -> bool:
    """Integer-only pure-equilibrium scan over the 9 base-4 digits."""
    for i in range(3):
        for j in range(3):
            dij = d[3 * i + j]
            if not m1[dij] and (
                m1[d[j]] or m1[d[3 + j]] or m1[d[6 + j]]
            ):
                continue
            if not m2[dij] and (
                m2[d[3 * i]] or m2[d[3 * i + 1]] or m2[d[3 * i + 2]]
            ):
                continue
            return True
    return False


def _atlas_game(d, alphabet, a, b) -> TwoValuesGame:
    mu1 = tuple(
        tuple(alphabet[d[3 * i + j]][0] for j in range(3)) for i in range(3)
    )
    mu2 = tuple(
        tuple(alphabet[d[3 * i + j]][1] for j in range(3)) for i in range(3)
    )
    return TwoValuesGame(Game(mu1, mu2), a, b)


def _atlas_chunk(args):
    start, stop, v_json, alphabet_json, collect_rows = args
    from .valuations import valuation_from_json

    v = valuation_from_json(v_json)
    a, b = v.a, v.b
    alphabet = tuple(
        (rational(p[0]), rational(p[1])) for p in alphabet_json
    )
    m1, m2 = _atlas_masks(alphabet, a)
    rows = []
    counts: dict[str, int] = {}
    failures = 0
    for gid in range(start, stop):
        d = _digits9(gid)
        if _has_pure_eq(d, m1, m2):
            counts["pure"] = counts.get("pure", 0) + 1
            if collect_rows:
                rows.append((gid, True, "1x1", "pure"))
            continue
        game = _atlas_game(d, alphabet, a, b)
        try:
            found = find_F_equilibrium(game, v)
        except Exception:
            found = None
        if found is None:
            failures += 1
            if collect_rows:
                rows.append((gid, False, "", ""))
            continue
        s1, s2 = found.profile.supports()
        label = f"{len(s1)}x{len(s2)}"
        counts[found.method] = counts.get(found.method, 0) + 1
        if collect_rows:
            rows.append((gid, True, label, found.method))
    return rows, counts, failures


def atlas_3x3(
    v: OneParamValuation,
    cells_alphabet=None,
    csv_path: Optional[str] = None,
    workers: Optional[int] = None,
    limit: Optional[int] = None,
):
    """Sweep every 3x3 two-values game (4^9 of them) and solve each.

    `cells_alphabet` orders the per-cell joint values and fixes the game
    numbering: cell (i, j) of game `gid` takes the pair at base-4 digit
    3*i + j.  Returns a summary dict; optionally writes one CSV row per
    game (game_id, solved, support_sizes, method).  `workers` defaults to
    the EQFORGE_THREADS environment variable, then 1.
    """
    from .valuations import valuation_to_json

    a, b = v.a, v.b
    if cells_alphabet is None:
        cells_alphabet = ((a, a), (a, b), (b, a), (b, b))
    alphabet = tuple((rational(p), rational(q)) for p, q in cells_alphabet)
    if sorted(alphabet) != sorted(
        ((a, a), (a, b), (b, a), (b, b))
    ):
        raise InputError("cells_alphabet must order the four (a,b) pairs")
    total = 4**9 if limit is None else min(limit, 4**9)
    if workers is None:
        workers = int(os.environ.get("EQFORGE_THREADS", "1") or "1")
    v_json = valuation_to_json(v)
    alphabet_json = [[str(p), str(q)] for p, q in alphabet]
    collect = csv_path is not None

    chunks = []
    step = max(1, total // max(1, workers * 8))
    s = 0
    while s < total:
        chunks.append((s, min(s + step, total), v_json, alphabet_json, collect))
        s += step

    all_rows = []
    counts: dict[str, int] = {}
    failures = 0
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_atlas_chunk, chunks))
    else:
        results = [_atlas_chunk(c) for c in chunks]
    for rows, cts, fails in results:
        failures += fails
        for k, n in cts.items():
            counts[k] = counts.get(k, 0) + n
        if collect:
            all_rows.extend(rows)

    if csv_path is not None:
        import csv

        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["game_id", "solved", "support_sizes", "method"])
            for gid, ok, label, method in all_rows:
                w.writerow([gid, "true" if ok else "false", label, method])
    return {
        "total": total,
        "solved": total - failures,
        "failures": failures,
        "by_method": dict(sorted(counts.items())),
    }
