"""Executable clause checks for the uniqueness/non-existence results.

Each predicate evaluates the finitely many boundary comparisons that decide
its theorem, records them as named (clause, bool) pairs, and — whenever the
verdict promises a constructible object — builds the matching profile from
`families.known_equilibrium` and re-verifies it before returning.

Unimodality turns the universally quantified clauses into point checks:
once F drops weakly below b at some x, it stays below for every larger x,
so "F < b from t onward" is decided by the sign of F(t) - b alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .equilibrium import verify_F_equilibrium
from .families import FamilySpec, gen_C, gen_D, known_equilibrium
from .games import EqforgeError, InputError, InvariantError, Profile, TwoValuesGame
from .valuations import (
    HalfClass,
    OneParamValuation,
    classify_half,
    compare_to_b,
    is_unimodal,
    x0_of,
    x1_of,
)

__all__ = [
    "ToleranceUndecidedError",
    "TheoremVerdict",
    "dm_uniqueness",
    "cm_nonexistence",
    "panorama",
    "synthesize_counterexample",
    "evar_ppad_regime",
]

DM_UNIQUENESS = "DmUniqueness"
CM_NONEXISTENCE = "CmNonexistence"
PANORAMA = "Panorama"


class ToleranceUndecidedError(EqforgeError):
    """A clause comparison fell inside the tolerance band of an inexact
    valuation; the theorem's truth flips on exact equality, so no boolean
    verdict is safe."""


@dataclass(frozen=True)
class TheoremVerdict:
    theorem: str  # DM_UNIQUENESS | CM_NONEXISTENCE | PANORAMA
    holds: bool
    witness: Optional[object] = None  # Profile or FamilySpec
    conditions: tuple = field(default_factory=tuple)  # ((name, bool), ...)

    def to_json(self) -> dict:
        from .games import profile_to_json

        if isinstance(self.witness, Profile):
            wit = {"profile": profile_to_json(self.witness)}
        elif isinstance(self.witness, FamilySpec):
            wit = {"family": self.witness.describe()}
        else:
            wit = None
        return {
            "theorem": self.theorem,
            "holds": self.holds,
            "witness": wit,
            "conditions": [[name, bool(val)] for name, val in self.conditions],
        }


def _sign_vs_b(v: OneParamValuation, x, tol: Optional[float]) -> int:
    """Sign of F(x) - b, refusing to guess inside an inexact band."""
    s = compare_to_b(v, x) if tol is None else compare_to_b(v, x, tol)
    if s == 0 and not v.exact:
        raise ToleranceUndecidedError(
            f"F({x}) - b falls inside the tolerance band; clause undecidable"
        )
    return s


def _verified_witness(
    g: TwoValuesGame, v: OneParamValuation, prof: Profile, tol
) -> Profile:
    rep = verify_F_equilibrium(g, v, prof, tol)
    if not rep.is_equilibrium:
        raise InvariantError(
            "theorem witness failed verification: "
            f"player {rep.witness.player} deviates to {rep.witness.strategy}"
        )
    return prof


def _require_unimodal(v: OneParamValuation):
    if not is_unimodal(v):
        raise InputError("this predicate requires a unimodal valuation")


def dm_uniqueness(
    m: int, v: OneParamValuation, tol: Optional[float] = None
) -> TheoremVerdict:
    """Is the uniform profile the only F-equilibrium of the m-cycle game?

    Clauses: m <= 3; for even m >= 4, F(2/m) != b and F(2/(m-2)) < b; for
    odd m >= 5, F(2/(m-1)) < b.  When uniqueness fails, the witness is the
    alternate equilibrium the failing clause predicts (an even/odd split or
    a two-support block), verified on gen_D(m).
    """
    if m < 2:
        raise InputError("dm_uniqueness requires m >= 2")
    _require_unimodal(v)
    if m <= 3:
        return TheoremVerdict(DM_UNIQUENESS, True, None, (("m<=3", True),))
    g = gen_D(m, v.a, v.b)
    if m % 2 == 0:
        c1 = _sign_vs_b(v, Fraction(2, m), tol) != 0
        c2 = _sign_vs_b(v, Fraction(2, m - 2), tol) < 0
        conds = (("m<=3", False), ("F(2/m)!=b", c1), ("F(2/(m-2))<b", c2))
        if c1 and c2:
            return TheoremVerdict(DM_UNIQUENESS, True, None, conds)
        regime = "even-split" if not c1 else "odd-block"
        prof = _verified_witness(g, v, known_equilibrium("D", m, regime), tol)
        return TheoremVerdict(DM_UNIQUENESS, False, prof, conds)
    c = _sign_vs_b(v, Fraction(2, m - 1), tol) < 0
    conds = (("m<=3", False), ("F(2/(m-1))<b", c))
    if c:
        return TheoremVerdict(DM_UNIQUENESS, True, None, conds)
    prof = _verified_witness(g, v, known_equilibrium("D", m, "odd-block"), tol)
    return TheoremVerdict(DM_UNIQUENESS, False, prof, conds)


def cm_nonexistence(
    m: int, v: OneParamValuation, tol: Optional[float] = None
) -> TheoremVerdict:
    """Does the extended game C_m admit no F-equilibrium at all?

    Clauses: F(1/m) > b, plus F(2/m) < b for even m, or F(2/(m+1)) != b and
    F(2/(m-1)) < b for odd m.  When some clause fails, the witness is the
    corresponding construction (uniform on the cycle part, or a two-support
    block using the extra strategies), verified on gen_C(m).
    """
    if m < 2:
        raise InputError("cm_nonexistence requires m >= 2")
    _require_unimodal(v)
    g = gen_C(m, v.a, v.b)
    c0 = _sign_vs_b(v, Fraction(1, m), tol) > 0
    if m % 2 == 0:
        c1 = _sign_vs_b(v, Fraction(2, m), tol) < 0
        conds = (("F(1/m)>b", c0), ("F(2/m)<b", c1))
        if c0 and c1:
            return TheoremVerdict(CM_NONEXISTENCE, True, None, conds)
        regime = "uniform" if not c0 else "C-even"
        prof = _verified_witness(g, v, known_equilibrium("C", m, regime), tol)
        return TheoremVerdict(CM_NONEXISTENCE, False, prof, conds)
    s1 = _sign_vs_b(v, Fraction(2, m + 1), tol)
    c1 = s1 != 0
    c2 = _sign_vs_b(v, Fraction(2, m - 1), tol) < 0
    conds = (("F(1/m)>b", c0), ("F(2/(m+1))!=b", c1), ("F(2/(m-1))<b", c2))
    if c0 and c1 and c2:
        return TheoremVerdict(CM_NONEXISTENCE, True, None, conds)
    if not c0:
        regime = "uniform"
    elif not c1:
        regime = "C-odd-equal"
    else:
        regime = "C-odd-geq"
    prof = _verified_witness(g, v, known_equilibrium("C", m, regime), tol)
    return TheoremVerdict(CM_NONEXISTENCE, False, prof, conds)


def synthesize_counterexample(
    v: OneParamValuation, tol: Optional[float] = None
) -> Optional[tuple[int, TwoValuesGame]]:
    """A game with no F-equilibrium, when the valuation admits one.

    Returns None when x0 = 0 or F(1/2) = b (every game then has an
    F-equilibrium, so no counterexample exists).  Otherwise picks the
    unique m with 1/m < x1 <= 1/(m-1) and returns (m, gen_C(m)); the
    non-existence clauses are re-checked before returning.
    """
    _require_unimodal(v)
    x0 = x0_of(v)
    if x0 == 0 or classify_half(v) == HalfClass.EQUAL:
        return None
    x1 = x1_of(v)
    if isinstance(x1, Fraction):
        q = Fraction(1) / x1
        m = q.numerator // q.denominator + 1
    else:
        m = math.floor(1.0 / float(x1)) + 1
    if m < 2:
        raise InvariantError(f"synthesized m={m} out of range (x1={x1})")
    verdict = cm_nonexistence(m, v, tol)
    if not verdict.holds:
        raise InvariantError(
            f"synthesized m={m} fails the non-existence clauses: "
            f"{verdict.conditions}"
        )
    return m, gen_C(m, v.a, v.b)


def panorama(
    v: OneParamValuation, tol: Optional[float] = None
) -> TheoremVerdict:
    """Do all two-values games admit an F-equilibrium for this valuation?

    Holds exactly when x0 = 0 or F(1/2) = b; otherwise the witness names
    the synthesized counterexample family instance.
    """
    _require_unimodal(v)
    c0 = x0_of(v) == 0
    c1 = classify_half(v) == HalfClass.EQUAL
    conds = (("x0=0", c0), ("F(1/2)=b", c1))
    if c0 or c1:
        return TheoremVerdict(PANORAMA, True, None, conds)
    m, _ = synthesize_counterexample(v, tol)
    spec = FamilySpec(family="C", m=m, a=v.a, b=v.b)
    return TheoremVerdict(PANORAMA, False, spec, conds)


def evar_ppad_regime(v: OneParamValuation) -> bool:
    """Is this variance-penalized valuation in the x0 = 0 regime?

    True iff gamma * (b - a) <= 1, the range where existence holds for all
    games and the search problem reduces to the expectation case.
    """
    if v.kind != "evar":
        raise InputError("evar_ppad_regime requires a variance-penalized valuation")
    return v.gamma * (v.b - v.a) <= 1
