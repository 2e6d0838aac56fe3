"""Finite convex mixtures standing in for universal semimeasures.

A mixture m = sum_i a_i P_i over a finite family dominates every component
pointwise with constant 1/a_i, which is the whole content of universality at
desk scale; the countable enumeration of all lower-semicomputable
semimeasures is deliberately replaced by explicit finite families. All
identities tested against the mixture are exact for the mixture itself.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import FamilySizeError, InputError, UNDEFINED
from .semimeasure import (
    BivariateSemimeasure,
    ConditionalSemimeasure,
    Semimeasure,
    Word,
    as_word,
    iter_words,
)

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# weight schemes
# ---------------------------------------------------------------------------

def dyadic_weights(count: int) -> tuple[Fraction, ...]:
    """a_i = 2^-i for i = 1..count; the sum stays strictly below 1."""
    return tuple(Fraction(1, 2**i) for i in range(1, count + 1))


def ilog2_weights(count: int) -> tuple[Fraction, ...]:
    """a_i proportional to 1 / ((i+1) * floor(log2(i+1))^2), normalized to sum 1.

    The integer log keeps the weights rational; the index shift avoids the
    vanishing logarithm at 1.
    """
    terms = []
    for i in range(1, count + 1):
        lg = (i + 1).bit_length() - 1
        terms.append(Fraction(1, (i + 1) * max(1, lg) ** 2))
    scale = ONE / sum(terms)
    return tuple(t * scale for t in terms)


WEIGHT_SCHEMES: Mapping[str, Callable[[int], tuple[Fraction, ...]]] = {
    "dyadic": dyadic_weights,
    "ilog2": ilog2_weights,
}


# ---------------------------------------------------------------------------
# univariate mixtures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixtureModel:
    """Weighted convex combination of semimeasures over a common space."""

    components: tuple
    weights: tuple[Fraction, ...]
    scheme: str = "explicit"

    def __post_init__(self):
        if not self.components:
            raise InputError("a mixture needs at least one component")
        if len(self.weights) != len(self.components):
            raise InputError("weights and components must align")
        if any(w <= 0 for w in self.weights):
            raise InputError("weights must be positive")
        if sum(self.weights) > 1:
            raise InputError("weights must sum to at most 1")

    def mass(self, word) -> Fraction:
        return sum(
            (w * c.mass(word) for w, c in zip(self.weights, self.components)), ZERO
        )

    def dense(self) -> Semimeasure:
        """Materialize the mixture as a dense semimeasure (components must be dense)."""
        first = self.components[0]
        leaves = [ZERO] * (first.alphabet_size**first.depth)
        for w, comp in zip(self.weights, self.components):
            if comp.depth != first.depth or comp.alphabet_size != first.alphabet_size:
                raise InputError("dense mixture needs components of one shape")
            for idx, m in enumerate(comp.leaf_mass):
                leaves[idx] += w * m
        return Semimeasure(first.depth, first.alphabet_size, tuple(leaves))

    def dominates_components(self) -> bool:
        """Exact pointwise dominance m >= a_i P_i, the universality certificate."""
        dense = self.dense()
        for w, comp in zip(self.weights, self.components):
            for idx, m in enumerate(comp.leaf_mass):
                if dense.leaf_mass[idx] < w * m:
                    return False
        return True


def build_mixture(
    components: Sequence,
    scheme: str = "dyadic",
    weights: Sequence[Fraction] | None = None,
) -> MixtureModel:
    components = tuple(components)
    if not components:
        raise InputError("cannot build a mixture over an empty family")
    if weights is not None:
        return MixtureModel(components, tuple(Fraction(w) for w in weights), "explicit")
    try:
        weight_fn = WEIGHT_SCHEMES[scheme]
    except KeyError:
        raise InputError(f"unknown weight scheme {scheme!r}") from None
    return MixtureModel(components, weight_fn(len(components)), scheme)


class ProductMixture:
    """Pointwise product of a mixture over x and a (possibly conditional) mixture over y.

    Dominates every product of components with constant 1/(a_i b_j).
    """

    def __init__(self, m_x: MixtureModel, m_y: MixtureModel):
        depths = {c.depth for c in m_x.components} | {c.depth for c in m_y.components}
        if len(depths) != 1:
            raise InputError("product mixture requires matching depths")
        self.m_x = m_x
        self.m_y = m_y

    @staticmethod
    def _component_mass(comp, y, x) -> Fraction:
        if isinstance(comp, ConditionalSemimeasure):
            m = comp.mass(y, x)
            return ZERO if m is UNDEFINED else m
        return comp.mass(y)

    def y_mass_given(self, y, x) -> Fraction:
        return sum(
            (w * self._component_mass(c, y, x) for w, c in zip(self.m_y.weights, self.m_y.components)),
            ZERO,
        )

    def pair_mass(self, x, y) -> Fraction:
        return self.m_x.mass(x) * self.y_mass_given(y, x)

    def dominates(self, x, y) -> bool:
        value = self.pair_mass(x, y)
        for a, p in zip(self.m_x.weights, self.m_x.components):
            for b, q in zip(self.m_y.weights, self.m_y.components):
                if value < a * b * p.mass(x) * self._component_mass(q, y, x):
                    return False
        return True


# ---------------------------------------------------------------------------
# staged monotone enumeration
# ---------------------------------------------------------------------------

def depth_restriction(table: Semimeasure, m: int) -> Semimeasure:
    """The table's prefix masses at depth min(m, depth), as a semimeasure."""
    m = min(m, table.depth)
    leaves = tuple(table.prefix_mass(w) for w in iter_words(m, table.alphabet_size))
    return Semimeasure(m, table.alphabet_size, leaves)


def staged_enumeration(
    streams: Sequence[Callable[[int], Sequence[Fraction]]],
    testable: Callable[[Semimeasure], bool],
    t_max: int,
    depth: int,
    alphabet_size: int = 2,
) -> list[list[Semimeasure]]:
    """Validated monotone approximants from anytime candidate streams.

    At stage t, stream i (1-based) is polled only once t >= i. A candidate
    table is accepted when its mass stays at most 1, it is leafwise at least
    the last accepted table, and the testability predicate holds on every
    depth restriction up to t; otherwise the stream keeps its last accepted
    table for this stage. Invalid streams freeze, they never abort the run.
    """
    zero = Semimeasure(depth, alphabet_size, (ZERO,) * alphabet_size**depth)
    if not testable(zero):
        raise InputError("the testability predicate must accept the zero table")
    accepted = [zero] * len(streams)
    history: list[list[Semimeasure]] = [list(accepted)]
    for t in range(1, t_max + 1):
        for i, stream in enumerate(streams):
            if i + 1 > t:
                continue
            try:
                raw = tuple(Fraction(v) for v in stream(t))
                candidate = Semimeasure(depth, alphabet_size, raw)
            except (InputError, ValueError, ZeroDivisionError):
                continue  # malformed or mass above 1: freeze
            if any(c < p for c, p in zip(candidate.leaf_mass, accepted[i].leaf_mass)):
                continue
            if all(testable(depth_restriction(candidate, m)) for m in range(t + 1)):
                accepted[i] = candidate
        history.append(list(accepted))
    return history


# ---------------------------------------------------------------------------
# Markov model families
# ---------------------------------------------------------------------------

def grid_rows(grid: int, alphabet_size: int = 2, proper_only: bool = False) -> tuple[tuple[Fraction, ...], ...]:
    """Next-symbol rows with every mass a multiple of 1/grid and row sum <= 1."""
    if grid < 1:
        raise InputError("grid resolution must be at least 1")
    rows = []
    for nums in itertools.product(range(grid + 1), repeat=alphabet_size):
        total = sum(nums)
        if total > grid or (proper_only and total != grid):
            continue
        rows.append(tuple(Fraction(v, grid) for v in nums))
    return tuple(rows)


@dataclass(frozen=True)
class MarkovTable:
    """Order-k next-symbol table; contexts shorter than k cover the first steps."""

    order: int
    alphabet_size: int
    rows: Mapping[Word, tuple[Fraction, ...]]

    def __post_init__(self):
        rows = {as_word(ctx, self.alphabet_size): tuple(Fraction(m) for m in row)
                for ctx, row in self.rows.items()}
        for ctx, row in rows.items():
            if len(row) != self.alphabet_size:
                raise InputError("row width must equal the alphabet size")
            if any(m < 0 for m in row) or sum(row) > 1:
                raise InputError(f"invalid row at context {ctx}")
        object.__setattr__(self, "rows", rows)

    def context_at(self, past: Word) -> Word:
        return past[max(0, len(past) - self.order):]

    def next_masses(self, past: Word) -> tuple[Fraction, ...]:
        return self.rows[self.context_at(past)]

    def is_proper(self) -> bool:
        return all(sum(row) == 1 for row in self.rows.values())

    def unroll(self, depth: int) -> Semimeasure:
        """Dense depth-n semimeasure with leaf mass prod_i q(x_i | context)."""
        a = self.alphabet_size
        masses = [ONE]
        for step in range(depth):
            nxt = []
            for idx, prefix_mass in enumerate(masses):
                prefix = _digits(idx, step, a)
                row = self.next_masses(prefix)
                for sym in range(a):
                    nxt.append(prefix_mass * row[sym])
            masses = nxt
        return Semimeasure(depth, a, tuple(masses))


def _digits(index: int, length: int, base: int) -> Word:
    out = [0] * length
    for pos in range(length - 1, -1, -1):
        out[pos] = index % base
        index //= base
    return tuple(out)


def _all_contexts(order: int, alphabet_size: int) -> list[Word]:
    contexts: list[Word] = []
    for length in range(order + 1):
        contexts.extend(iter_words(length, alphabet_size))
    return contexts


@dataclass(frozen=True)
class MarkovFamily:
    """The finite family of order-k tables on a rational grid."""

    order: int
    grid: int
    alphabet_size: int
    tables: tuple[MarkovTable, ...]

    @property
    def descriptor(self) -> dict:
        return {"type": "markov", "order": self.order, "grid": self.grid,
                "alphabet": self.alphabet_size, "size": len(self.tables)}

    def unrolled(self, depth: int) -> tuple[Semimeasure, ...]:
        return tuple(t.unroll(depth) for t in self.tables)


def markov_family(
    order: int,
    grid: int,
    alphabet_size: int = 2,
    max_size: int = 10000,
    proper_only: bool = False,
) -> MarkovFamily:
    """Enumerate every row-valid order-k table with grid-rational entries."""
    if order < 0:
        raise InputError("order must be nonnegative")
    rows = grid_rows(grid, alphabet_size, proper_only)
    contexts = _all_contexts(order, alphabet_size)
    size = len(rows) ** len(contexts)
    if size > max_size:
        raise FamilySizeError(size, max_size)
    tables = []
    for assignment in itertools.product(rows, repeat=len(contexts)):
        tables.append(MarkovTable(order, alphabet_size, dict(zip(contexts, assignment))))
    return MarkovFamily(order, grid, alphabet_size, tuple(tables))


# ---------------------------------------------------------------------------
# wired pairs: bivariate components built from Markov tables
# ---------------------------------------------------------------------------

class Wiring(str, enum.Enum):
    """Where a series' next-symbol context is read from.

    OWN: its own strict past. CROSS: the other series' strict past.
    CROSS_INST: the other series' past including the current step.
    """

    OWN = "own"
    CROSS = "cross"
    CROSS_INST = "cross+"


DEFAULT_WIRINGS: tuple[tuple[Wiring, Wiring], ...] = (
    (Wiring.OWN, Wiring.OWN),
    (Wiring.OWN, Wiring.CROSS),
    (Wiring.OWN, Wiring.CROSS_INST),
    (Wiring.CROSS, Wiring.OWN),
    (Wiring.CROSS_INST, Wiring.OWN),
    (Wiring.CROSS, Wiring.CROSS),
)


@dataclass(frozen=True)
class PairComponent:
    """P(x, y) = prod_t qX(x_t | ctx) qY(y_t | ctx) with per-series context wiring.

    Both series reading the other's current symbol is rejected: the resulting
    product can exceed total mass 1 and is not a semimeasure.
    """

    x_table: MarkovTable
    x_wiring: Wiring
    y_table: MarkovTable
    y_wiring: Wiring

    def __post_init__(self):
        if self.x_wiring is Wiring.CROSS_INST and self.y_wiring is Wiring.CROSS_INST:
            raise InputError("at most one series may read the other's current symbol")
        if self.x_table.alphabet_size != self.y_table.alphabet_size:
            raise InputError("pair tables need a common alphabet")

    @property
    def alphabet_size(self) -> int:
        return self.x_table.alphabet_size

    def step_masses(self, x_past: Word, y_past: Word, x_sym: int, y_sym: int) -> Fraction:
        """qX(x_sym | ctx) * qY(y_sym | ctx) at one step."""
        if self.x_wiring is Wiring.OWN:
            x_ctx = self.x_table.context_at(x_past)
        elif self.x_wiring is Wiring.CROSS:
            x_ctx = self.x_table.context_at(y_past)
        else:
            x_ctx = self.x_table.context_at(y_past + (y_sym,))
        if self.y_wiring is Wiring.OWN:
            y_ctx = self.y_table.context_at(y_past)
        elif self.y_wiring is Wiring.CROSS:
            y_ctx = self.y_table.context_at(x_past)
        else:
            y_ctx = self.y_table.context_at(x_past + (x_sym,))
        return self.x_table.rows[x_ctx][x_sym] * self.y_table.rows[y_ctx][y_sym]

    def pair_mass(self, x, y) -> Fraction:
        a = self.alphabet_size
        xw = as_word(x, a)
        yw = as_word(y, a)
        if len(xw) != len(yw):
            raise InputError("pair mass needs equal lengths")
        value = ONE
        for t in range(len(xw)):
            value *= self.step_masses(xw[:t], yw[:t], xw[t], yw[t])
        return value

    def mass(self, pair) -> Fraction:
        x, y = pair
        return self.pair_mass(x, y)


def pair_family(
    order: int,
    grid: int,
    alphabet_size: int = 2,
    wirings: Sequence[tuple[Wiring, Wiring]] = DEFAULT_WIRINGS,
    tie_initial: bool = True,
    max_size: int = 4096,
) -> tuple[PairComponent, ...]:
    """Wired-pair components over proper order-k tables.

    tie_initial pins every context shorter than k to the uniform row, which
    keeps the family small without losing the coupled/uncoupled structure the
    influence tests discriminate on. Proper rows make every component a
    probability measure, so prefix masses are plain forward products.
    """
    rows = grid_rows(grid, alphabet_size, proper_only=True)
    uniform_row = tuple(Fraction(1, alphabet_size) for _ in range(alphabet_size))
    if tie_initial and uniform_row not in rows:
        raise InputError("tie_initial needs the uniform row on the grid (even grid)")
    full_contexts = list(iter_words(order, alphabet_size))
    short_contexts = [c for c in _all_contexts(order, alphabet_size) if len(c) < order]
    n_tables = len(rows) ** len(full_contexts)
    size = n_tables**2 * len(wirings)
    if size > max_size:
        raise FamilySizeError(size, max_size)
    tables = []
    for assignment in itertools.product(rows, repeat=len(full_contexts)):
        rows_map: dict[Word, tuple[Fraction, ...]] = dict(zip(full_contexts, assignment))
        for ctx in short_contexts:
            rows_map[ctx] = uniform_row
        tables.append(MarkovTable(order, alphabet_size, rows_map))
    components = []
    for wx, wy in wirings:
        for tx in tables:
            for ty in tables:
                components.append(PairComponent(tx, wx, ty, wy))
    return tuple(components)


# ---------------------------------------------------------------------------
# exact mixture evaluation along prefix staircases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Staircase:
    """All mixture prefix masses needed by the factorization at one data pair.

    diag[i] = m(x^i, y^i) for i = 0..n; x_first[i-1] = m(x^i, y^{i-1}) and
    y_first[i-1] = m(x^{i-1}, y^i) for i = 1..n; marginal_x = m(x),
    marginal_y = m(y).
    """

    depth: int
    diag: tuple[Fraction, ...]
    x_first: tuple[Fraction, ...]
    y_first: tuple[Fraction, ...]
    marginal_x: Fraction
    marginal_y: Fraction

    @staticmethod
    def _chain(numerators, denominators):
        value = ONE
        for num, den in zip(numerators, denominators):
            if den == 0:
                return UNDEFINED
            value *= num / den
        return value

    def causal_x_given_y(self):
        """m(x | y^) = prod_i m(x^i, y^{i-1}) / m(x^{i-1}, y^{i-1})."""
        return self._chain(self.x_first, self.diag[:-1])

    def inst_y_given_x(self):
        """m(y | x^+) = prod_i m(x^i, y^i) / m(x^i, y^{i-1})."""
        return self._chain(self.diag[1:], self.x_first)

    def causal_y_given_x(self):
        """m(y | x^) = prod_i m(x^{i-1}, y^i) / m(x^{i-1}, y^{i-1})."""
        return self._chain(self.y_first, self.diag[:-1])

    def inst_x_given_y(self):
        """m(x | y^+) = prod_i m(x^i, y^i) / m(x^{i-1}, y^i)."""
        return self._chain(self.diag[1:], self.y_first)

    def pair(self) -> Fraction:
        return self.diag[-1]

    def root(self) -> Fraction:
        return self.diag[0]


def staircase_from_bivariate(P: BivariateSemimeasure, x, y) -> Staircase:
    """Staircase of exact prefix-pair masses of a dense bivariate semimeasure."""
    a = P.alphabet_size
    xw = as_word(x, a)
    yw = as_word(y, a)
    n = P.depth
    if len(xw) != n or len(yw) != n:
        raise InputError("staircase needs full-depth words")
    diag = tuple(P.prefix_pair_mass(xw[:i], yw[:i]) for i in range(n + 1))
    x_first = tuple(P.prefix_pair_mass(xw[:i], yw[: i - 1]) for i in range(1, n + 1))
    y_first = tuple(P.prefix_pair_mass(xw[: i - 1], yw[:i]) for i in range(1, n + 1))
    return Staircase(n, diag, x_first, y_first,
                     P.prefix_pair_mass(xw, ()), P.prefix_pair_mass((), yw))


class _ComponentScan:
    """Integer-numerator scan of one wired pair component along a data pair.

    Every table entry is a multiple of 1/grid, so each step contributes two
    grid factors; all returned numerators share the denominator grid^(2n).
    Working in integers keeps Fraction normalization out of the hot loop.
    Deficient tables go through an exact tail-sum table; proper tables skip it.
    """

    def __init__(self, comp: PairComponent, grid: int):
        self.comp = comp
        self.grid = grid
        self.a = comp.alphabet_size
        self.k = max(comp.x_table.order, comp.y_table.order)
        self.proper = comp.x_table.is_proper() and comp.y_table.is_proper()
        self.x_rows = {ctx: tuple(int(m * grid) for m in row)
                       for ctx, row in comp.x_table.rows.items()}
        self.y_rows = {ctx: tuple(int(m * grid) for m in row)
                       for ctx, row in comp.y_table.rows.items()}
        self.x_order = comp.x_table.order
        self.y_order = comp.y_table.order
        self._step_num = self._make_step()

    def _make_step(self):
        # bind rows and wiring once; the returned closure is the hot loop body
        x_rows, y_rows = self.x_rows, self.y_rows
        kx, ky = self.x_order, self.y_order
        wx, wy = self.comp.x_wiring, self.comp.y_wiring

        def ctx_of(src: Word, order: int) -> Word:
            return src if len(src) <= order else src[-order:]

        def step(x_past: Word, y_past: Word, xs: int, ys: int) -> int:
            if wx is Wiring.OWN:
                xsrc = x_past
            elif wx is Wiring.CROSS:
                xsrc = y_past
            else:
                xsrc = y_past + (ys,)
            xq = x_rows[() if kx == 0 else ctx_of(xsrc, kx)][xs]
            if xq == 0:
                return 0
            if wy is Wiring.OWN:
                ysrc = y_past
            elif wy is Wiring.CROSS:
                ysrc = x_past
            else:
                ysrc = x_past + (xs,)
            return xq * y_rows[() if ky == 0 else ctx_of(ysrc, ky)][ys]

        return step

    def _tails(self, n: int) -> list[dict[tuple[Word, Word], int]] | None:
        # tails[t][(xwin, ywin)] = grid^(2(n-t)) * mass of all free completions
        if self.proper:
            return None
        a, k = self.a, self.k
        window_pairs = [
            (xw, yw)
            for length in range(k + 1)
            for xw in iter_words(length, a)
            for yw in iter_words(length, a)
        ]
        tables: list[dict[tuple[Word, Word], int]] = [dict() for _ in range(n + 1)]
        for pair in window_pairs:
            tables[n][pair] = 1
        for t in range(n - 1, -1, -1):
            for xw, yw in window_pairs:
                acc = 0
                for xs in range(a):
                    for ys in range(a):
                        num = self._step_num(xw, yw, xs, ys)
                        if num == 0:
                            continue
                        nxw = (xw + (xs,))[-k:] if k else ()
                        nyw = (yw + (ys,))[-k:] if k else ()
                        acc += num * tables[t + 1][(nxw, nyw)]
                tables[t][(xw, yw)] = acc
        return tables

    def scan(self, xw: Word, yw: Word):
        """Numerators of diag, x_first, y_first, and the marginals.

        Proper components return slot-wise numerators: diag[i] and the
        x_first/y_first entries at step i carry denominator grid^(2i), the
        marginals grid^(2n). Deficient components fold in tail sums and put
        everything over grid^(2n). The boolean tells the caller which.
        """
        a, k = self.a, self.k
        n = len(xw)
        step = self._step_num
        if self.proper:
            diag = [1]
            x_first = []
            y_first = []
            fp = 1
            for t in range(n):
                x_past, y_past = xw[:t], yw[:t]
                xt, yt = xw[t], yw[t]
                acc_x = 0
                acc_y = 0
                for sym in range(a):
                    acc_x += step(x_past, y_past, xt, sym)
                    acc_y += step(x_past, y_past, sym, yt)
                x_first.append(fp * acc_x)
                y_first.append(fp * acc_y)
                fp *= step(x_past, y_past, xt, yt)
                diag.append(fp)
            return (diag, x_first, y_first,
                    self._marginal(xw, yw, True), self._marginal(xw, yw, False), True)

        grid2 = self.grid * self.grid
        tails = self._tails(n)

        def tail(t: int, xwin: Word, ywin: Word) -> int:
            return tails[t][(xwin, ywin)]

        diag = [tail(0, (), ())]
        x_first = []
        y_first = []
        fp = 1
        for t in range(n):
            x_past, y_past = xw[:t], yw[:t]
            acc_x = 0
            acc_y = 0
            for sym in range(a):
                num_xf = step(x_past, y_past, xw[t], sym)
                if num_xf:
                    acc_x += num_xf * tail(t + 1, (x_past + (xw[t],))[-k:] if k else (),
                                           (y_past + (sym,))[-k:] if k else ())
                num_yf = step(x_past, y_past, sym, yw[t])
                if num_yf:
                    acc_y += num_yf * tail(t + 1, (x_past + (sym,))[-k:] if k else (),
                                           (y_past + (yw[t],))[-k:] if k else ())
            x_first.append(fp * acc_x)
            y_first.append(fp * acc_y)
            fp *= step(x_past, y_past, xw[t], yw[t])
            diag.append(fp * tail(t + 1, (x_past + (xw[t],))[-k:] if k else (),
                                  (y_past + (yw[t],))[-k:] if k else ()))
        return (diag, x_first, y_first,
                self._marginal(xw, yw, True), self._marginal(xw, yw, False), False)

    def _marginal(self, xw: Word, yw: Word, fix_x: bool) -> int:
        # forward sum over the free series; numerator over grid^(2n)
        a, k = self.a, self.k
        n = len(xw)
        states: dict[tuple[Word, Word], int] = {((), ()): 1}
        for t in range(n):
            nxt: dict[tuple[Word, Word], int] = {}
            for (xp, yp), num in states.items():
                x_syms = (xw[t],) if fix_x else tuple(range(a))
                y_syms = tuple(range(a)) if fix_x else (yw[t],)
                for xs in x_syms:
                    for ys in y_syms:
                        step = self._step_num(xp, yp, xs, ys)
                        if step == 0:
                            continue
                        key = ((xp + (xs,))[-k:] if k else (), (yp + (ys,))[-k:] if k else ())
                        nxt[key] = nxt.get(key, 0) + num * step
            states = nxt
        return sum(states.values())


class BivariateMixture:
    """Exact mixture over wired pair components, evaluated along staircases.

    The staircase supplies the mixture's own (instantaneous-)causal parts,
    marginals, and pair mass at a data pair, all as exact rationals; this is
    the machinery the influence tests consume.
    """

    def __init__(
        self,
        components: Sequence[PairComponent],
        grid: int,
        scheme: str = "dyadic",
        weights: Sequence[Fraction] | None = None,
        descriptor: Mapping | None = None,
    ):
        self.components = tuple(components)
        if not self.components:
            raise InputError("cannot build a mixture over an empty family")
        self.grid = grid
        if weights is None:
            self.weights = WEIGHT_SCHEMES[scheme](len(self.components))
            self.scheme = scheme
        else:
            self.weights = tuple(Fraction(w) for w in weights)
            self.scheme = "explicit"
        if sum(self.weights) > 1 or any(w <= 0 for w in self.weights):
            raise InputError("invalid mixture weights")
        denom = 1
        for w in self.weights:
            denom = denom * w.denominator // math.gcd(denom, w.denominator)
        self._weight_denom = denom
        self._weight_nums = tuple(int(w * denom) for w in self.weights)
        self.descriptor = dict(descriptor or {})
        self._scans = tuple(_ComponentScan(c, grid) for c in self.components)

    def component_weight(self, index: int) -> Fraction:
        return self.weights[index]

    def staircase(self, x, y) -> Staircase:
        a = self.components[0].alphabet_size
        xw = as_word(x, a)
        yw = as_word(y, a)
        if len(xw) != len(yw):
            raise InputError("staircase needs equal-length words")
        n = len(xw)
        grid2 = self.grid * self.grid
        diag_acc = [0] * (n + 1)
        xf_acc = [0] * n
        yf_acc = [0] * n
        mx_acc = 0
        my_acc = 0
        all_slots = True
        for wnum, scan in zip(self._weight_nums, self._scans):
            diag, x_first, y_first, marg_x, marg_y, slots = scan.scan(xw, yw)
            if not slots:
                # deficient components carry denominator grid^(2n) everywhere;
                # lift the slot-wise accumulators once, then stay lifted
                if all_slots:
                    for i in range(n + 1):
                        diag_acc[i] *= grid2 ** (n - i)
                    for i in range(n):
                        xf_acc[i] *= grid2 ** (n - 1 - i)
                        yf_acc[i] *= grid2 ** (n - 1 - i)
                    all_slots = False
            if slots and not all_slots:
                diag = [v * grid2 ** (n - i) for i, v in enumerate(diag)]
                x_first = [v * grid2 ** (n - 1 - i) for i, v in enumerate(x_first)]
                y_first = [v * grid2 ** (n - 1 - i) for i, v in enumerate(y_first)]
            for i in range(n + 1):
                diag_acc[i] += wnum * diag[i]
            for i in range(n):
                xf_acc[i] += wnum * x_first[i]
                yf_acc[i] += wnum * y_first[i]
            mx_acc += wnum * marg_x
            my_acc += wnum * marg_y
        wd = self._weight_denom
        marg_denom = wd * grid2**n
        if all_slots:
            return Staircase(
                n,
                tuple(Fraction(v, wd * grid2**i) for i, v in enumerate(diag_acc)),
                tuple(Fraction(v, wd * grid2 ** (i + 1)) for i, v in enumerate(xf_acc)),
                tuple(Fraction(v, wd * grid2 ** (i + 1)) for i, v in enumerate(yf_acc)),
                Fraction(mx_acc, marg_denom),
                Fraction(my_acc, marg_denom),
            )
        return Staircase(
            n,
            tuple(Fraction(v, marg_denom) for v in diag_acc),
            tuple(Fraction(v, marg_denom) for v in xf_acc),
            tuple(Fraction(v, marg_denom) for v in yf_acc),
            Fraction(mx_acc, marg_denom),
            Fraction(my_acc, marg_denom),
        )

    def pair_mass(self, x, y) -> Fraction:
        return self.staircase(x, y).pair()
