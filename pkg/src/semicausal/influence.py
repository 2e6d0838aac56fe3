"""Ideal influence tests and the information-transfer decomposition.

All statistics here are log2 ratios of masses taken from one evaluator (a
dense bivariate semimeasure or an exact finite mixture). With a single
evaluator m the mutual information splits exactly into two directed terms
and an instantaneous term,

    I       = log m(x,y) / (m(x) m(y))
    T_xy    = log m(x|y^) / m(x)          (transfer into x from y's past)
    T_yx    = log m(y|x^) / m(y)
    T_inst  = log m(x,y) / (m(x|y^) m(y|x^))
    I = T_xy + T_yx + T_inst              (zero rational residue)

because the log arguments cancel multiplicatively. The residue is checked on
the exact rationals, not on floats. The five hypothesis-pair tests are the
corresponding ratios of the evaluator's causal parts; each is reported
independently, and a vanishing denominator makes only that ratio undefined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import UNDEFINED, InputError
from .mixture import BivariateMixture, Staircase, staircase_from_bivariate
from .semimeasure import BivariateSemimeasure, iter_words

# test names keyed by the hypothesis pair they compare: assumed model -> probed model
TEST_NAMES = (
    "instantaneous_vs_strict",  # assume x instantaneously causes y; are they strict causal?
    "strict_vs_free",           # assume strict causal; is y influence-free of x?
    "hidden_vs_instantaneous",  # assume hidden variables; does x instantaneously cause y?
    "hidden_vs_strict",         # assume hidden variables; are x, y strict causal?
    "hidden_vs_free",           # assume hidden variables; is y influence-free of x?
)


def log2_fraction(q: Fraction) -> float:
    """Exact-rational source of truth, 64-bit float export."""
    if q <= 0:
        raise InputError("log of a nonpositive rational")
    return math.log2(q.numerator) - math.log2(q.denominator)


def get_staircase(evaluator, x, y) -> Staircase:
    if isinstance(evaluator, BivariateSemimeasure):
        return staircase_from_bivariate(evaluator, x, y)
    if isinstance(evaluator, BivariateMixture):
        return evaluator.staircase(x, y)
    if isinstance(evaluator, Staircase):
        return evaluator
    raise InputError(f"no staircase evaluation for {type(evaluator).__name__}")


def _ratio(num, den):
    if num is UNDEFINED or den is UNDEFINED or den == 0:
        return UNDEFINED
    return num / den


@dataclass(frozen=True)
class IdealTestResult:
    name: str
    exact: Fraction | None  # None when undefined or infinite in log
    log2: float | None
    flags: tuple[str, ...] = ()

    @property
    def defined(self) -> bool:
        return self.exact is not None


def _result(name: str, value, flags: tuple[str, ...] = ()) -> IdealTestResult:
    if value is UNDEFINED:
        return IdealTestResult(name, None, None, flags + ("undefined",))
    if value == 0:
        return IdealTestResult(name, Fraction(0), -math.inf, flags + ("zero-ratio",))
    return IdealTestResult(name, value, log2_fraction(value), flags)


def influence_tests(x, y, machinery) -> dict[str, IdealTestResult]:
    """The five hypothesis-pair ratios at data (x, y), from one mixture machinery.

    The influence-free numerator that would need a shortest program for the
    condition is replaced by the plain conditional m(x|y); the substitution
    is flagged on that test.
    """
    st = get_staircase(machinery, x, y)
    pair = st.pair()
    m_x = st.marginal_x
    m_y = st.marginal_y
    yx_causal = st.causal_y_given_x()
    yx_inst = st.inst_y_given_x()
    xy_causal = st.causal_x_given_y()
    xy_inst = st.inst_x_given_y()
    m_x_given_y = _ratio(pair, m_y)

    results = {
        "instantaneous_vs_strict": _result(
            "instantaneous_vs_strict", _ratio(yx_inst, yx_causal)
        ),
        "strict_vs_free": _result("strict_vs_free", _ratio(yx_causal, m_y)),
        "hidden_vs_instantaneous": _result(
            "hidden_vs_instantaneous",
            _ratio(pair, xy_inst * yx_causal)
            if xy_inst is not UNDEFINED and yx_causal is not UNDEFINED
            else UNDEFINED,
        ),
        "hidden_vs_strict": _result(
            "hidden_vs_strict",
            _ratio(pair, xy_causal * yx_causal)
            if xy_causal is not UNDEFINED and yx_causal is not UNDEFINED
            else UNDEFINED,
        ),
        "hidden_vs_free": _result(
            "hidden_vs_free",
            _ratio(m_x_given_y, xy_inst),
            flags=("conditional-substituted-for-shortest-program",),
        ),
    }
    return results


@dataclass(frozen=True)
class Decomposition:
    """Mutual information and its directed/instantaneous split, one evaluator.

    The *_arg fields are the exact rational log arguments; term floats are
    their log2 export. exact_identity is the zero-residue check
    I_arg == T_xy_arg * T_yx_arg * T_inst_arg on the rationals.
    """

    mutual_information: float
    transfer_xy: float
    transfer_yx: float
    instantaneous: float
    mi_arg: Fraction
    xy_arg: Fraction
    yx_arg: Fraction
    inst_arg: Fraction

    @property
    def exact_identity(self) -> bool:
        return self.mi_arg == self.xy_arg * self.yx_arg * self.inst_arg

    def terms(self) -> dict[str, float]:
        return {
            "I": self.mutual_information,
            "T_xy": self.transfer_xy,
            "T_yx": self.transfer_yx,
            "T_inst": self.instantaneous,
        }


def decomposition(evaluator, x, y) -> Decomposition:
    """Exact I / T_xy / T_yx / T_inst at (x, y); needs positive masses throughout."""
    st = get_staircase(evaluator, x, y)
    pair = st.pair()
    xy_causal = st.causal_x_given_y()
    yx_causal = st.causal_y_given_x()
    if (
        pair == 0
        or st.marginal_x == 0
        or st.marginal_y == 0
        or xy_causal is UNDEFINED
        or yx_causal is UNDEFINED
        or xy_causal == 0
        or yx_causal == 0
    ):
        raise InputError("decomposition needs strictly positive masses at (x, y)")
    mi_arg = pair / (st.marginal_x * st.marginal_y)
    xy_arg = xy_causal / st.marginal_x
    yx_arg = yx_causal / st.marginal_y
    inst_arg = pair / (xy_causal * yx_causal)
    return Decomposition(
        log2_fraction(mi_arg),
        log2_fraction(xy_arg),
        log2_fraction(yx_arg),
        log2_fraction(inst_arg),
        mi_arg,
        xy_arg,
        yx_arg,
        inst_arg,
    )


@dataclass(frozen=True)
class IndependentDecomposition:
    """The four terms with independently built universal elements per slot.

    The directed terms take their conditional from a mixture over the
    strict-causal conditional class and their marginal from a mixture over
    the univariate class; the instantaneous term uses the joint mixture's
    own associated causal parts. Because the slots are filled by different
    constructions (all equal only up to multiplicative constants), the
    identity I = T_xy + T_yx + T_inst holds only approximately here; the
    residual is reported, never hidden. One shared evaluator instead makes
    it exact, which is what `decomposition` computes.
    """

    mutual_information: float
    transfer_xy: float
    transfer_yx: float
    instantaneous: float

    @property
    def identity_residual(self) -> float:
        return self.mutual_information - (
            self.transfer_xy + self.transfer_yx + self.instantaneous
        )

    def terms(self) -> dict[str, float]:
        return {
            "I": self.mutual_information,
            "T_xy": self.transfer_xy,
            "T_yx": self.transfer_yx,
            "T_inst": self.instantaneous,
        }


def _rule_product(table, wiring, own, other) -> Fraction:
    """prod_t q(own_t | wired context): a conditional class member at full data."""
    from .mixture import Wiring

    value = Fraction(1)
    for t in range(len(own)):
        if wiring is Wiring.OWN:
            ctx = table.context_at(own[:t])
        elif wiring is Wiring.CROSS:
            ctx = table.context_at(other[:t])
        else:
            ctx = table.context_at(other[: t + 1])
        value *= table.rows[ctx][own[t]]
    return value


def independent_decomposition(x, y, machinery: BivariateMixture) -> IndependentDecomposition:
    """EIT-style terms with a separately built universal element per slot.

    The univariate class is the family's own-wired tables and the
    strict-causal conditional class its own/cross-wired tables, each mixed
    under the machinery's weight scheme; the instantaneous term comes from
    the joint mixture's associated causal parts.
    """
    from .mixture import WEIGHT_SCHEMES, Wiring

    xw = tuple(int(v) for v in x)
    yw = tuple(int(v) for v in y)
    tables = []
    seen = set()
    for comp in machinery.components:
        for table in (comp.x_table, comp.y_table):
            key = tuple(sorted(table.rows.items()))
            if key not in seen:
                seen.add(key)
                tables.append(table)
    scheme = machinery.scheme if machinery.scheme in WEIGHT_SCHEMES else "dyadic"

    def class_mixture(members, evaluate):
        weights = WEIGHT_SCHEMES[scheme](len(members))
        return sum((w * evaluate(m) for w, m in zip(weights, members)), Fraction(0))

    univariate = [(t, Wiring.OWN) for t in tables]
    causal_cond = [(t, w) for w in (Wiring.OWN, Wiring.CROSS) for t in tables]

    m_x = class_mixture(univariate, lambda m: _rule_product(m[0], m[1], xw, yw))
    m_y = class_mixture(univariate, lambda m: _rule_product(m[0], m[1], yw, xw))
    m_x_causal = class_mixture(causal_cond, lambda m: _rule_product(m[0], m[1], xw, yw))
    m_y_causal = class_mixture(causal_cond, lambda m: _rule_product(m[0], m[1], yw, xw))
    st = machinery.staircase(xw, yw)
    m_pair = st.pair()
    assoc_x = st.causal_x_given_y()
    assoc_y = st.causal_y_given_x()
    values = (m_x, m_y, m_x_causal, m_y_causal, m_pair, assoc_x, assoc_y)
    if UNDEFINED in values or 0 in values:
        raise InputError("independent decomposition needs positive class-mixture masses")
    return IndependentDecomposition(
        log2_fraction(m_pair / (m_x * m_y)),
        log2_fraction(m_x_causal / m_x),
        log2_fraction(m_y_causal / m_y),
        log2_fraction(m_pair / (assoc_x * assoc_y)),
    )


def swap_identity_holds(P: BivariateSemimeasure, x, y) -> bool:
    """m(x|y^) m(y|x^+) = m(x|y^+) m(y|x^) at (x, y), both telescoping to the pair mass."""
    st = staircase_from_bivariate(P, x, y)
    left = (st.causal_x_given_y(), st.inst_y_given_x())
    right = (st.inst_x_given_y(), st.causal_y_given_x())
    if UNDEFINED in left or UNDEFINED in right:
        return True  # nothing to compare at undefined points
    return left[0] * left[1] == right[0] * right[1]


def relative_entropy_bits(P, m) -> float:
    """sum_x P(x) log2(P(x) / m(x)) over the component's support, as float."""
    total = 0.0
    for w in iter_words(P.depth, P.alphabet_size):
        p = P.leaf(w)
        if p == 0:
            continue
        mw = m.leaf(w)
        if mw == 0:
            raise InputError("mixture mass vanishes on a component's support")
        total += float(p) * log2_fraction(p / mw)
    return total


def expectation_bound_holds(P, mixture_dense, weight: Fraction) -> tuple[bool, float, float]:
    """Check 0 <= sum_x P(x) log(P(x)/m(x)) <= log(1/weight).

    Returns (holds, value, upper_bound). The lower bound is a theorem only
    for components of total mass 1; callers decide what to assert for
    deficient components.
    """
    value = relative_entropy_bits(P, mixture_dense)
    upper = log2_fraction(Fraction(1) / weight)
    eps = 1e-9  # float export slack; the sources are exact rationals
    return (-eps <= value <= upper + eps, value, upper)
