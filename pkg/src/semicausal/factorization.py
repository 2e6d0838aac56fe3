"""Causal factorizations of bivariate semimeasures and the influence predicates.

The causal part of P(x, y) on the x side is the product of next-symbol
ratios that see only the strict past of y,

    P(x | y^) = prod_i P(x^i, y^{i-1}) / P(x^{i-1}, y^{i-1}),

and the instantaneous part additionally sees y's current symbol,

    P(x | y^+) = prod_i P(x^i, y^i) / P(x^{i-1}, y^i).

Taking the x-steps strictly first and the y-steps instantaneously second
telescopes exactly through the staircase of prefix pairs, giving

    P(x, y) = P(e, e) * P(x | y^) * P(y | x^+)

for every pair, with no positivity assumption beyond "where defined".
Ratios at zero-mass contexts are UNDEFINED, never a numeric default; every
predicate in this module quantifies only over defined points.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InputError, UNDEFINED
from .semimeasure import (
    BivariateSemimeasure,
    ConditionalSemimeasure,
    Word,
    as_word,
    format_rational,
    iter_words,
    parse_rational,
)


class Mode(str, enum.Enum):
    CAUSAL = "causal"
    INSTANTANEOUS = "instantaneous"


class Side(str, enum.Enum):
    X_GIVEN_Y = "x_given_y"
    Y_GIVEN_X = "y_given_x"


Context = tuple[Word, Word]  # (own prefix so far, conditioning window)


@dataclass(frozen=True)
class CausalKernel:
    """Per-step next-symbol conditionals extracted from a bivariate semimeasure.

    entries maps a context (own prefix of length i-1, conditioning window of
    length i-1 for causal mode or i for instantaneous) to the exact masses of
    the own series' next symbol. Contexts whose conditioning mass vanished are
    listed in `undefined`, explicitly.
    """

    depth: int
    alphabet_size: int
    side: Side
    mode: Mode
    entries: Mapping[Context, tuple[Fraction, ...]]
    undefined: frozenset[Context]

    def __post_init__(self):
        for ctx, masses in self.entries.items():
            if sum(masses) > 1:
                raise InputError(f"kernel row at {ctx} has mass above 1")
            if any(m < 0 for m in masses):
                raise InputError(f"kernel row at {ctx} has a negative mass")

    def _window(self, own: Word, cond: Word, i: int) -> Context:
        cut = i if self.mode is Mode.INSTANTANEOUS else i - 1
        return (own[: i - 1], cond[:cut])

    def step_mass(self, own: Word, cond: Word, i: int):
        """Mass of own[i-1] in context at step i (1-based); UNDEFINED on gaps."""
        ctx = self._window(own, cond, i)
        if ctx in self.undefined:
            return UNDEFINED
        row = self.entries.get(ctx)
        if row is None:
            return UNDEFINED
        return row[own[i - 1]]

    def to_json_dict(self) -> dict:
        def ctx_key(ctx: Context) -> str:
            own, cond = ctx
            return "".join(map(str, own)) + ":" + "".join(map(str, cond))

        entries = [
            {"context": ctx_key(ctx), "symbol_masses": [format_rational(m) for m in row]}
            for ctx, row in sorted(self.entries.items(), key=lambda kv: (len(kv[0][0]), kv[0]))
        ]
        return {
            "depth": self.depth,
            "alphabet": self.alphabet_size,
            "side": self.side.value,
            "mode": self.mode.value,
            "entries": entries,
            "undefined_contexts": sorted(
                "".join(map(str, own)) + ":" + "".join(map(str, cond))
                for own, cond in self.undefined
            ),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "CausalKernel":
        def parse_ctx(text: str) -> Context:
            own, _, cond = text.partition(":")
            return (tuple(int(c) for c in own), tuple(int(c) for c in cond))

        try:
            entries = {
                parse_ctx(e["context"]): tuple(parse_rational(t) for t in e["symbol_masses"])
                for e in doc["entries"]
            }
            undefined = frozenset(parse_ctx(t) for t in doc.get("undefined_contexts", []))
            return cls(
                int(doc["depth"]),
                int(doc.get("alphabet", 2)),
                Side(doc["side"]),
                Mode(doc["mode"]),
                entries,
                undefined,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed kernel document: {exc}") from exc


def causal_part(P: BivariateSemimeasure, side: Side, mode: Mode) -> CausalKernel:
    """Extract the (instantaneous-)causal next-symbol kernel of one side of P."""
    a = P.alphabet_size
    n = P.depth
    entries: dict[Context, tuple[Fraction, ...]] = {}
    undefined = set()
    for i in range(1, n + 1):
        cond_len = i if mode is Mode.INSTANTANEOUS else i - 1
        for own in iter_words(i - 1, a):
            for cond in iter_words(cond_len, a):
                if side is Side.X_GIVEN_Y:
                    denom = P.prefix_pair_mass(own, cond)
                else:
                    denom = P.prefix_pair_mass(cond, own)
                if denom == 0:
                    undefined.add((own, cond))
                    continue
                if side is Side.X_GIVEN_Y:
                    row = tuple(P.prefix_pair_mass(own + (s,), cond) / denom for s in range(a))
                else:
                    row = tuple(P.prefix_pair_mass(cond, own + (s,)) / denom for s in range(a))
                entries[(own, cond)] = row
    return CausalKernel(n, a, side, mode, entries, frozenset(undefined))


def evaluate_kernel(K: CausalKernel, x, y):
    """Product of the per-step conditionals at (x, y); UNDEFINED if any step is.

    x is always the first series and y the second, regardless of the kernel's
    side; the empty product at depth 0 is 1.
    """
    xw = as_word(x, K.alphabet_size)
    yw = as_word(y, K.alphabet_size)
    if len(xw) != K.depth or len(yw) != K.depth:
        raise InputError(f"kernel evaluation needs words of length {K.depth}")
    own, cond = (xw, yw) if K.side is Side.X_GIVEN_Y else (yw, xw)
    value = Fraction(1)
    for i in range(1, K.depth + 1):
        step = K.step_mass(own, cond, i)
        if step is UNDEFINED:
            return UNDEFINED
        value *= step
    return value


def factorization_identity(P: BivariateSemimeasure):
    """Check P(x, y) = P(e, e) * P(x|y^) * P(y|x^+) on every defined pair.

    Returns (holds, witness): witness is the first violating (x, y) pair, or
    None. Pairs where either factor is undefined are skipped.
    """
    root = P.prefix_pair_mass((), ())
    causal_x = causal_part(P, Side.X_GIVEN_Y, Mode.CAUSAL)
    inst_y = causal_part(P, Side.Y_GIVEN_X, Mode.INSTANTANEOUS)
    for x in iter_words(P.depth, P.alphabet_size):
        for y in iter_words(P.depth, P.alphabet_size):
            left = evaluate_kernel(causal_x, x, y)
            right = evaluate_kernel(inst_y, x, y)
            if left is UNDEFINED or right is UNDEFINED:
                continue
            if P.pair_mass(x, y) != root * left * right:
                return False, (x, y)
    return True, None


def _association_contexts(Pcond: ConditionalSemimeasure, mode: Mode):
    """Next-symbol ratios of a conditional, per context, across condition extensions.

    For each step i and context (own prefix + next symbol, conditioning
    window), collect P(own^i | c) / P(own^{i-1} | c) over all full conditions
    c extending the window where the denominator is positive. The association
    is well defined at a context only when those ratios agree.
    """
    a = Pcond.alphabet_size
    n = Pcond.depth
    values: dict[tuple[Word, Word, int], Fraction] = {}
    for i in range(1, n + 1):
        cond_len = i if mode is Mode.INSTANTANEOUS else i - 1
        for own in iter_words(i - 1, a):
            for window in iter_words(cond_len, a):
                for sym in range(a):
                    seen = set()
                    for tail in iter_words(n - cond_len, a):
                        cond = window + tail
                        if not Pcond.has(cond):
                            continue
                        denom = Pcond.prefix_mass(own, cond)
                        if denom == 0:
                            continue
                        seen.add(Pcond.prefix_mass(own + (sym,), cond) / denom)
                    if len(seen) > 1:
                        return None  # inconsistent: no single kernel exists
                    if seen:
                        values[(own, window, sym)] = seen.pop()
    return values


def is_causal(Pcond: ConditionalSemimeasure, mode: Mode = Mode.CAUSAL) -> bool:
    """True iff the conditional equals its own (instantaneous-)causal association.

    The association's step ratios must be constant across extensions of the
    conditioning window, and their product must reproduce the conditional at
    every point where all steps are defined.
    """
    values = _association_contexts(Pcond, mode)
    if values is None:
        return False
    a = Pcond.alphabet_size
    n = Pcond.depth
    for cond in iter_words(n, a):
        if not Pcond.has(cond):
            continue
        for own in iter_words(n, a):
            prod = Fraction(1)
            defined = True
            for i in range(1, n + 1):
                cut = i if mode is Mode.INSTANTANEOUS else i - 1
                key = (own[: i - 1], cond[:cut], own[i - 1])
                if key not in values:
                    defined = False
                    break
                prod *= values[key]
            if defined and prod != Pcond.mass(own, cond):
                return False
    return True


def influence_free(P: BivariateSemimeasure) -> bool:
    """True iff P(x | y^) = P(x) at every pair where the causal part is defined."""
    kernel = causal_part(P, Side.X_GIVEN_Y, Mode.CAUSAL)
    marginal = P.x_marginal()
    for x in iter_words(P.depth, P.alphabet_size):
        for y in iter_words(P.depth, P.alphabet_size):
            value = evaluate_kernel(kernel, x, y)
            if value is UNDEFINED:
                continue
            if value != marginal.leaf(x):
                return False
    return True


@dataclass(frozen=True)
class EquivalenceReport:
    """Independently evaluated forms of the five instantaneous-cause conditions."""

    conditional_is_instantaneous_causal: bool  # (i)
    y_prefix_needs_only_x_prefix: bool  # (ii)
    x_tail_ignores_y: bool  # (iii)
    x_next_ignores_y: bool  # (iv)
    x_influence_free_of_y: bool  # (v)

    def as_tuple(self) -> tuple[bool, bool, bool, bool, bool]:
        return (
            self.conditional_is_instantaneous_causal,
            self.y_prefix_needs_only_x_prefix,
            self.x_tail_ignores_y,
            self.x_next_ignores_y,
            self.x_influence_free_of_y,
        )

    @property
    def all_agree(self) -> bool:
        return len(set(self.as_tuple())) == 1


def equivalence_suite(P: BivariateSemimeasure) -> EquivalenceReport:
    """Evaluate the five equivalent conditions by independent brute force."""
    a = P.alphabet_size
    n = P.depth

    # (i) the derived conditional P(y | x) is instantaneous causal
    cond_i = is_causal(P.conditional_y_given_x(), Mode.INSTANTANEOUS)

    # (ii) P(y^i | x) = P(y^i | x^i) where defined
    cond_ii = True
    for i in range(n + 1):
        for x in iter_words(n, a):
            px = P.prefix_pair_mass(x, ())
            for yi in iter_words(i, a):
                pxi = P.prefix_pair_mass(x[:i], ())
                lhs = P.prefix_pair_mass(x, yi) / px if px > 0 else None
                rhs = P.prefix_pair_mass(x[:i], yi) / pxi if pxi > 0 else None
                if lhs is not None and rhs is not None and lhs != rhs:
                    cond_ii = False

    # (iii) P(x | x^i, y^i) = P(x | x^i) where defined; conditioning on the
    # partner's same-length prefix is what the Bayes step from (ii) yields,
    # and what the step to (v) consumes
    cond_iii = True
    for i in range(n + 1):
        for x in iter_words(n, a):
            pxi = P.prefix_pair_mass(x[:i], ())
            rhs = P.prefix_pair_mass(x, ()) / pxi if pxi > 0 else None
            for yi in iter_words(i, a):
                denom = P.prefix_pair_mass(x[:i], yi)
                lhs = P.prefix_pair_mass(x, yi) / denom if denom > 0 else None
                if lhs is not None and rhs is not None and lhs != rhs:
                    cond_iii = False

    # (iv) P(x_{i+1} | x^i, y^i) = P(x_{i+1} | x^i) where defined
    cond_iv = True
    for i in range(n):
        for xi in iter_words(i + 1, a):
            pxi = P.prefix_pair_mass(xi[:i], ())
            rhs = P.prefix_pair_mass(xi, ()) / pxi if pxi > 0 else None
            for yi in iter_words(i, a):
                denom = P.prefix_pair_mass(xi[:i], yi)
                lhs = P.prefix_pair_mass(xi, yi) / denom if denom > 0 else None
                if lhs is not None and rhs is not None and lhs != rhs:
                    cond_iv = False

    # (v) x is influence-free of y
    cond_v = influence_free(P)

    return EquivalenceReport(cond_i, cond_ii, cond_iii, cond_iv, cond_v)


@dataclass(frozen=True)
class UniformityReport:
    uniform: bool
    gap_conditions: tuple[Word, ...]


def total_mass_uniformity(Pcond: ConditionalSemimeasure) -> UniformityReport:
    """True iff the total conditioned mass is one constant rational across conditions.

    Gap conditions contribute total 0 and are reported separately so callers
    can tell a genuine nonuniformity from missing kernel entries.
    """
    totals = set()
    gaps = []
    for cond in iter_words(Pcond.depth, Pcond.alphabet_size):
        if Pcond.has(cond):
            totals.add(Pcond.total(cond))
        else:
            gaps.append(cond)
            totals.add(Fraction(0))
    return UniformityReport(uniform=len(totals) <= 1, gap_conditions=tuple(gaps))
