"""One-parameter valuations F of the a-probability x, with F(0)=b, F(1)=a.

A player's cost distribution in a two-values game is a two-point
distribution determined by the single number x = P(cost = a).  A valuation
maps that x to an effective cost.  Four families are built in:

* expectation        F(x) = a*x + b*(1-x)                      (linear)
* mean-variance      F(x) = a*x + b*(1-x) + gamma*(b-a)^2 * x*(1-x)
* mean-stddev        F(x) = a*x + b*(1-x) + gamma*(b-a) * sqrt(x*(1-x))
* conditional value  F(x) = b                       for x <= alpha
  at risk (CVaR)            ((x-alpha)*a + (1-x)*b)/(1-alpha)  for x > alpha

plus user-supplied concave callables with a declared peak.  All are concave;
all but CVaR have a unique maximum (CVaR plateaus at b on [0, alpha]).

Arithmetic is exact rational wherever algebraically possible; the only
square root (mean-stddev) is evaluated in binary floating point.  Sign
tests against b avoid floats entirely for the built-in families: the sign
of F(x) - b has a closed rational form for each of them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .games import (
    Game,
    InputError,
    InvariantError,
    MixedStrategy,  # noqa: F401  (re-exported convenience)
    Profile,
    TwoValuesGame,
    rational,
    x_value,
)

__all__ = [
    "HalfClass",
    "OneParamValuation",
    "ValuationAnalysis",
    "eval_F",
    "x0_of",
    "x0_search",
    "x1_of",
    "classify_half",
    "compare_to_b",
    "compare_to_b_exact",
    "is_unimodal",
    "analyze",
    "cvar_of_distribution",
    "var_of_distribution",
    "valuation_of_profile",
    "cost_distribution",
    "valuation_to_json",
    "valuation_from_json",
]


class HalfClass(enum.Enum):
    """How F(1/2) compares with b."""

    LESS = "Less"
    EQUAL = "Equal"
    GREATER = "Greater"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class OneParamValuation:
    """A valuation; construct through the classmethods below."""

    kind: str  # "expectation" | "evar" | "esd" | "cvar" | "custom"
    a: Fraction
    b: Fraction
    gamma: Optional[Fraction] = None
    alpha: Optional[Fraction] = None
    func: Optional[Callable[[float], float]] = None
    declared_x0: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "a", rational(self.a))
        object.__setattr__(self, "b", rational(self.b))
        if not self.a < self.b:
            raise InputError("valuation requires a < b")
        if self.kind in ("evar", "esd"):
            if self.gamma is None:
                raise InputError(f"{self.kind} needs gamma")
            object.__setattr__(self, "gamma", rational(self.gamma))
            if self.gamma <= 0:
                raise InputError("gamma must be positive")
        elif self.kind == "cvar":
            if self.alpha is None:
                raise InputError("cvar needs alpha")
            object.__setattr__(self, "alpha", rational(self.alpha))
            if not 0 < self.alpha < 1:
                raise InputError("alpha must lie strictly between 0 and 1")
        elif self.kind == "custom":
            if self.func is None or self.declared_x0 is None:
                raise InputError("custom valuation needs func and declared_x0")
            fa, fb = float(self.func(1.0)), float(self.func(0.0))
            if abs(fb - float(self.b)) > 1e-12 * float(self.b - self.a) or abs(
                fa - float(self.a)
            ) > 1e-12 * float(self.b - self.a):
                raise InputError("custom valuation must satisfy F(0)=b and F(1)=a")
        elif self.kind != "expectation":
            raise InputError(f"unknown valuation kind {self.kind!r}")

    # -- constructors -------------------------------------------------
    @classmethod
    def expectation(cls, a, b) -> "OneParamValuation":
        return cls("expectation", rational(a), rational(b))

    @classmethod
    def evar(cls, a, b, gamma) -> "OneParamValuation":
        return cls("evar", rational(a), rational(b), gamma=rational(gamma))

    @classmethod
    def esd(cls, a, b, gamma) -> "OneParamValuation":
        return cls("esd", rational(a), rational(b), gamma=rational(gamma))

    @classmethod
    def cvar(cls, a, b, alpha) -> "OneParamValuation":
        return cls("cvar", rational(a), rational(b), alpha=rational(alpha))

    @classmethod
    def custom(cls, a, b, func, x0) -> "OneParamValuation":
        return cls("custom", rational(a), rational(b), func=func, declared_x0=float(x0))

    # -- cheap flags ---------------------------------------------------
    @property
    def concave(self) -> bool:
        return True  # every supported kind is concave on [0,1]

    @property
    def exact(self) -> bool:
        """Can F(x) - b be sign-tested in exact rational arithmetic?"""
        return self.kind in ("expectation", "evar", "esd", "cvar")

    def describe(self) -> str:
        if self.kind == "expectation":
            return f"expectation(a={self.a}, b={self.b})"
        if self.kind in ("evar", "esd"):
            return f"{self.kind}(a={self.a}, b={self.b}, gamma={self.gamma})"
        if self.kind == "cvar":
            return f"cvar(a={self.a}, b={self.b}, alpha={self.alpha})"
        return f"custom(a={self.a}, b={self.b}, x0~{self.declared_x0:.6g})"


def _check_x(x):
    if not 0 <= x <= 1:
        raise InputError(f"x={x} outside [0,1]")


def eval_F(v: OneParamValuation, x):
    """F(x).  Exact Fraction where the closed form is rational, float otherwise."""
    _check_x(x)
    a, b = v.a, v.b
    if v.kind == "expectation":
        if isinstance(x, float):
            return float(a - b) * x + float(b)
        return (a - b) * rational(x) + b
    if v.kind == "evar":
        if isinstance(x, float):
            return float(a) * x + float(b) * (1 - x) + float(v.gamma) * float(b - a) ** 2 * x * (1 - x)
        x = rational(x)
        return a * x + b * (1 - x) + v.gamma * (b - a) ** 2 * x * (1 - x)
    if v.kind == "esd":
        xf = float(x)
        return float(a) * xf + float(b) * (1 - xf) + float(v.gamma) * float(b - a) * math.sqrt(xf * (1 - xf))
    if v.kind == "cvar":
        if isinstance(x, float):
            if x <= float(v.alpha):
                return float(b)
            return ((x - float(v.alpha)) * float(a) + (1 - x) * float(b)) / (1 - float(v.alpha))
        x = rational(x)
        if x <= v.alpha:
            return b
        return ((x - v.alpha) * a + (1 - x) * b) / (1 - v.alpha)
    return float(v.func(float(x)))


def compare_to_b_exact(v: OneParamValuation, x) -> Optional[int]:
    """Sign of F(x) - b in exact arithmetic, or None when not decidable.

    Closed forms (rational x, rational parameters):
      expectation: sign = -sign(x)
      evar:        sign = sign(x) * sign(gamma*(b-a)*(1-x) - 1)
      esd:         sign = sign(x) * sign(gamma^2*(1-x) - x)
      cvar:        0 for x <= alpha, -1 beyond
    """
    if isinstance(x, float) or not v.exact:
        return None
    x = rational(x)
    _check_x(x)
    if x == 0:
        return 0
    if v.kind == "expectation":
        return -1
    if v.kind == "evar":
        t = v.gamma * (v.b - v.a) * (1 - x) - 1
        return (t > 0) - (t < 0)
    if v.kind == "esd":
        t = v.gamma * v.gamma * (1 - x) - x
        return (t > 0) - (t < 0)
    if v.kind == "cvar":
        return 0 if x <= v.alpha else -1
    return None


def compare_to_b(v: OneParamValuation, x, tol: float = 1e-10) -> int:
    """Sign of F(x) - b; exact when possible, else within tol*(b-a)."""
    exact = compare_to_b_exact(v, x)
    if exact is not None:
        return exact
    diff = float(eval_F(v, x)) - float(v.b)
    band = tol * float(v.b - v.a)
    if abs(diff) <= band:
        return 0
    return 1 if diff > 0 else -1


def x0_of(v: OneParamValuation):
    """The argmax of F (smallest argmax for the CVaR plateau).

    Exact Fraction for expectation/evar/cvar; float for esd/custom.
    """
    if v.kind == "expectation":
        return Fraction(0)
    if v.kind == "evar":
        s = v.gamma * (v.b - v.a)
        return Fraction(1, 2) * (1 - 1 / s) if s > 1 else Fraction(0)
    if v.kind == "esd":
        g2 = float(v.gamma) ** 2
        return 0.5 - 0.5 / math.sqrt(g2 + 1.0)
    if v.kind == "cvar":
        return Fraction(0)
    return float(v.declared_x0)


def _sign(t) -> int:
    return (t > 0) - (t < 0)


def _sqrt_cmp(c: Fraction, d: Fraction, w: Fraction) -> int:
    """Sign of c - d*sqrt(w) for rationals with d >= 0, w >= 0."""
    if d == 0 or w == 0:
        return _sign(c)
    if c <= 0:
        return -1
    return _sign(c * c - d * d * w)


def _esd_F_cmp(gamma: Fraction, x: Fraction, y: Fraction) -> int:
    """Sign of F(x) - F(y) for the mean-plus-deviation form, exactly.

    Up to the positive factor (b-a), F(x) - F(y) equals
    gamma*(sqrt(x(1-x)) - sqrt(y(1-y))) - (x - y); the sign is decided by
    squaring twice, never by floating-point square roots.
    """
    u, w = x * (1 - x), y * (1 - y)
    t = x - y
    s_left = _sign(u - w)  # sign of sqrt(u) - sqrt(w), gamma > 0
    s_right = _sign(t)
    if s_left != s_right:
        return 1 if s_left > s_right else -1
    if s_left == 0:
        return 0
    # Same nonzero sign: compare magnitudes.  |left|^2 - t^2 reduces to
    # gamma^2*(u+w) - t^2 - 2*gamma^2*sqrt(u*w).
    c = gamma * gamma * (u + w) - t * t
    mag = _sqrt_cmp(c, 2 * gamma * gamma, u * w)
    return mag if s_left > 0 else -mag


def _F_cmp(v: OneParamValuation, x: Fraction, y: Fraction) -> int:
    """Sign of F(x) - F(y); exact for the built-in kinds, float otherwise."""
    if v.kind == "esd":
        return _esd_F_cmp(v.gamma, x, y)
    if v.exact:
        return _sign(eval_F(v, x) - eval_F(v, y))
    fx, fy = float(v.func(float(x))), float(v.func(float(y)))
    return _sign(fx - fy)


def x0_search(v: OneParamValuation, tol: float = 1e-12) -> float:
    """Generic argmax search by interval shrinking (oracle for the closed forms).

    The section comparisons use exact sign arithmetic for the built-in kinds,
    so the bracket converges to the true argmax at the requested tolerance.
    A custom valuation falls back to float comparisons, which cannot resolve
    a smooth maximum beyond about sqrt(machine epsilon).
    """
    lo, hi = Fraction(0), Fraction(1)
    bound = rational(tol) if tol > 0 else Fraction(1, 10**12)
    while hi - lo > bound:
        third = (hi - lo) / 3
        m1, m2 = lo + third, hi - third
        if _F_cmp(v, m1, m2) >= 0:
            hi = m2
        else:
            lo = m1
    mid = (lo + hi) / 2
    # A maximum attained at the left endpoint stays at exactly 0.
    return 0.0 if _F_cmp(v, Fraction(0), mid) >= 0 else float(mid)


def x1_of(v: OneParamValuation):
    """The unique point beyond the peak where F returns to b; None if x0=0.

    Exact closed forms: evar -> 1 - 1/(gamma*(b-a));  esd -> gamma^2/(1+gamma^2).
    """
    if not is_unimodal(v):
        raise InputError("x1 is defined for unimodal valuations only")
    x0 = x0_of(v)
    if x0 == 0:
        return None
    if v.kind == "evar":
        return 1 - 1 / (v.gamma * (v.b - v.a))
    if v.kind == "esd":
        g2 = v.gamma * v.gamma
        return g2 / (1 + g2)
    # generic bisection: F(x0) > b (unique max beyond 0) and F(1) = a < b
    lo, hi = float(x0), 1.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if hi - lo <= 1e-12:
            break
        if float(eval_F(v, mid)) > float(v.b):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def classify_half(v: OneParamValuation, tol: float = 1e-10) -> HalfClass:
    sign = compare_to_b(v, Fraction(1, 2), tol)
    return {1: HalfClass.GREATER, 0: HalfClass.EQUAL, -1: HalfClass.LESS}[sign]


def is_unimodal(v: OneParamValuation, grid_size: int = 256, tol: float = 1e-10) -> bool:
    """Concavity on a grid plus a unique (width <= 2 cells) maximum plateau.

    CVaR is concave but its maximum plateau is [0, alpha]: returns False.
    """
    if grid_size < 16:
        raise InputError("grid_size must be at least 16")
    if v.kind == "cvar":
        return False
    if v.kind in ("expectation", "evar", "esd"):
        return True  # concave closed forms with a unique maximum
    slack = tol * float(v.b - v.a)
    vals = [float(eval_F(v, t / grid_size)) for t in range(grid_size + 1)]
    for t in range(1, grid_size):
        if vals[t] < (vals[t - 1] + vals[t + 1]) / 2.0 - slack:
            return False
    top = max(vals)
    plateau = [t for t, val in enumerate(vals) if val >= top - slack]
    return plateau[-1] - plateau[0] <= 2 and len(plateau) == plateau[-1] - plateau[0] + 1


@dataclass(frozen=True)
class ValuationAnalysis:
    """The analytic quantities that drive every theorem."""

    x0: object
    x1: object  # None when x0 = 0
    half_class: HalfClass
    unimodal: bool


def analyze(v: OneParamValuation) -> ValuationAnalysis:
    uni = is_unimodal(v)
    x0 = x0_of(v)
    x1 = x1_of(v) if uni else None
    return ValuationAnalysis(x0=x0, x1=x1, half_class=classify_half(v), unimodal=uni)


# ---------------------------------------------------------------------------
# Distribution-level quantities (general games, CVaR on many-valued costs)
# ---------------------------------------------------------------------------


def _check_distribution(values, probs):
    values = [rational(x) for x in values]
    probs = [rational(q) for q in probs]
    if len(values) != len(probs) or not values:
        raise InputError("values and probs must be equal-length and nonempty")
    if any(values[i] >= values[i + 1] for i in range(len(values) - 1)):
        raise InputError("values must be strictly increasing")
    if any(q < 0 for q in probs) or sum(probs) != 1:
        raise InputError("probs must be non-negative and sum to 1")
    return values, probs


def var_of_distribution(values, probs, alpha) -> Fraction:
    """Smallest value whose cumulative probability reaches alpha."""
    values, probs = _check_distribution(values, probs)
    alpha = rational(alpha)
    if not 0 < alpha < 1:
        raise InputError("alpha must lie strictly between 0 and 1")
    cum = Fraction(0)
    for val, q in zip(values, probs):
        cum += q
        if cum >= alpha:
            return val
    raise InvariantError("cumulative probability never reached alpha")


def cvar_of_distribution(values, probs, alpha) -> Fraction:
    """Average cost in the worst (1-alpha) tail."""
    values, probs = _check_distribution(values, probs)
    alpha = rational(alpha)
    if not 0 < alpha < 1:
        raise InputError("alpha must lie strictly between 0 and 1")
    var = var_of_distribution(values, probs, alpha)
    at_or_below = sum((q for val, q in zip(values, probs) if val <= var), Fraction(0))
    above = sum((q * val for val, q in zip(values, probs) if val > var), Fraction(0))
    return ((at_or_below - alpha) * var + above) / (1 - alpha)


def valuation_of_profile(g: TwoValuesGame, k: int, v: OneParamValuation, prof: Profile):
    """V_k(p1, p2) = F(x_k(p1, p2))."""
    return eval_F(v, x_value(g, k, prof))


def cost_distribution(g: Game, k: int, prof: Profile):
    """Exact distribution of player k's cost: (sorted values, probabilities)."""
    if k not in (1, 2):
        raise InputError("player index must be 1 or 2")
    mat = g.mu1 if k == 1 else g.mu2
    acc: dict[Fraction, Fraction] = {}
    for i, pi in enumerate(prof.p1):
        if pi == 0:
            continue
        for j, pj in enumerate(prof.p2):
            if pj == 0:
                continue
            c = mat[i][j]
            acc[c] = acc.get(c, Fraction(0)) + pi * pj
    values = sorted(acc)
    return values, [acc[val] for val in values]


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def valuation_to_json(v: OneParamValuation) -> dict:
    d = {"kind": v.kind, "a": str(v.a), "b": str(v.b)}
    if v.kind in ("evar", "esd"):
        d["gamma"] = str(v.gamma)
    elif v.kind == "cvar":
        d["alpha"] = str(v.alpha)
    return d


def valuation_from_json(d: dict) -> OneParamValuation:
    kind = d.get("kind")
    if kind == "expectation":
        return OneParamValuation.expectation(d["a"], d["b"])
    if kind == "evar":
        return OneParamValuation.evar(d["a"], d["b"], d["gamma"])
    if kind == "esd":
        return OneParamValuation.esd(d["a"], d["b"], d["gamma"])
    if kind == "cvar":
        return OneParamValuation.cvar(d["a"], d["b"], d["alpha"])
    raise InputError(f"unknown valuation kind {kind!r}")
