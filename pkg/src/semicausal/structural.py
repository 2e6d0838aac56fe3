"""Structural-equation simulators and the exact inverse-CDF bit sampler.

A structural model explains a pair of symbol series as deterministic
bounded-memory rules fed by hidden uniform randomness. The four hypothesis
classes differ only in which histories each update rule may read:

    instantaneous cause   x_i <- (x-past, y-past, bits);  y_i <- (x-past incl. x_i, y-past, bits)
    strict causal         both read strict pasts and their own bits
    influence-free (of y) x_i <- (x-past, bits);          y_i <- (x-past incl. x_i, y-past, bits)
    hidden variables      both read only one shared bit stream

The class constraint is enforced structurally: a rule declares what it
reads, construction rejects reads the class forbids, and the simulator
never hands a rule a view it did not declare.

Symbols are drawn from exact rational distributions by the inverse-CDF
protocol: a dyadic prefix r of the hidden uniform variable determines the
symbol once the interval [r, r + 2^-l] fits inside one CDF cell; cells are
taken left-open (boundary reals resolve to the lower cell, settling the
two-expansion ambiguity), and a straddling interval returns UNDEFINED so
the sampler requests another bit. Deficient distributions leave the top of
the unit interval unresolvable, which is exactly their mass defect.
"""

from __future__ import annotations

import csv
import enum
import math
import random
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InputError, UNDEFINED
from .semimeasure import Word, as_word

ZERO = Fraction(0)
ONE = Fraction(1)

READ_OWN_PAST = "own_past"
READ_OTHER_PAST = "other_past"
READ_OTHER_CURRENT = "other_current"
READ_RANDOMNESS = "randomness"


# ---------------------------------------------------------------------------
# exact symbol drawing from dyadic prefixes
# ---------------------------------------------------------------------------

def inverse_cdf_sample(dist: Sequence[Fraction], r_num: int, r_len: int):
    """Symbol whose CDF cell contains the dyadic interval [r, r + 2^-l], else UNDEFINED.

    dist is an exact distribution (or semimeasure) over symbols 0..m-1;
    r = r_num / 2^r_len is an r_len-bit prefix of a uniform variable.
    """
    if r_len < 0:
        raise InputError("prefix length must be nonnegative")
    if r_num < 0 or r_num >= 2**max(r_len, 1) or (r_len == 0 and r_num != 0):
        raise InputError("dyadic prefix outside [0, 1]")
    masses = [Fraction(m) for m in dist]
    if any(m < 0 for m in masses) or sum(masses) > 1:
        raise InputError("invalid distribution")
    r = Fraction(r_num, 2**r_len)
    top = r + Fraction(1, 2**r_len)
    lower = ZERO
    for symbol, mass in enumerate(masses):
        if mass == 0:
            continue
        upper = lower + mass
        in_cell = (r > lower) or (r == 0 and lower == 0)
        if in_cell and r <= upper:
            return symbol if top <= upper else UNDEFINED
        lower = upper
    return UNDEFINED  # r beyond the total mass: a deficient tail never resolves


_M64 = (1 << 64) - 1


class BitStream:
    """Deterministic bit source for one step of hidden randomness (splitmix64)."""

    def __init__(self, seed: int):
        self._state = seed & _M64
        self._buf = 0
        self._left = 0
        self.consumed = 0

    def next_bit(self) -> int:
        if self._left == 0:
            self._state = (self._state + 0x9E3779B97F4A7C15) & _M64
            z = self._state
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
            self._buf = z ^ (z >> 31)
            self._left = 64
        bit = self._buf & 1
        self._buf >>= 1
        self._left -= 1
        self.consumed += 1
        return bit


@lru_cache(maxsize=1024)
def _cdf_table(masses: tuple[Fraction, ...]) -> tuple[tuple[tuple[int, int, int], ...], int]:
    """(symbol, lower, upper) cumulative numerators over the common denominator."""
    denom = 1
    for m in masses:
        denom = denom * m.denominator // math.gcd(denom, m.denominator)
    cells = []
    lower = 0
    for symbol, m in enumerate(masses):
        num = int(m * denom)
        if num:
            cells.append((symbol, lower, lower + num))
        lower += num
    return tuple(cells), denom


def draw_symbol(dist: Sequence[Fraction], bits: BitStream, max_bits: int = 4096) -> int:
    """Extend the dyadic prefix until the inverse CDF resolves; exact in distribution.

    Integer-threshold equivalent of repeated inverse_cdf_sample calls on a
    growing prefix (asserted equivalent in the test suite).
    """
    cells, denom = _cdf_table(tuple(Fraction(m) for m in dist))
    if not cells:
        raise InputError("cannot draw from the zero distribution")
    r_num = 0
    for length in range(max_bits + 1):
        # interval [r, r+1]/2^l against cells (lower, upper]/denom (0 joins the first cell)
        scale = 1 << length
        r_scaled = r_num * denom
        top_scaled = (r_num + 1) * denom
        for symbol, lower, upper in cells:
            lo = lower * scale
            if (r_scaled > lo or (r_num == 0 and lower == 0)) and r_scaled <= upper * scale:
                if top_scaled <= upper * scale:
                    return symbol
                break
        r_num = (r_num << 1) | bits.next_bit()
    raise InputError("drawing did not resolve within the bit budget")


@dataclass(frozen=True)
class FidelityReport:
    tv_distance: float
    mean_bits: float
    samples: int


def sampler_fidelity(dist: Sequence[Fraction], n_samples: int, seed: int) -> FidelityReport:
    """Empirical total-variation distance of the bit sampler against its target."""
    if n_samples < 1:
        raise InputError("need at least one sample")
    masses = [Fraction(m) for m in dist]
    master = random.Random(f"fidelity|{seed}")
    counts = [0] * len(masses)
    total_bits = 0
    for _ in range(n_samples):
        bits = BitStream(master.getrandbits(64))
        counts[draw_symbol(masses, bits)] += 1
        total_bits += bits.consumed
    tv = sum(abs(Fraction(c, n_samples) - m) for c, m in zip(counts, masses)) / 2
    return FidelityReport(float(tv), total_bits / n_samples, n_samples)


# ---------------------------------------------------------------------------
# update rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RuleViews:
    """What the simulator lets one rule see at one step; undeclared views are None."""

    own_past: Word | None
    other_past: Word | None
    other_current: int | None


@dataclass(frozen=True)
class Rule:
    """Bounded-memory update rule: (declared views, step randomness) -> next symbol."""

    reads: frozenset[str]
    memory: int
    bits_per_step: int
    alphabet_size: int = 2

    def next_symbol(self, views: RuleViews, bits: BitStream) -> int:
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class IidRule(Rule):
    masses: tuple[Fraction, ...] = (Fraction(1, 2), Fraction(1, 2))

    def next_symbol(self, views: RuleViews, bits: BitStream) -> int:
        return draw_symbol(self.masses, bits)

    def descriptor(self) -> dict:
        return {"type": "iid", "p": [str(m) for m in self.masses]}


def iid_rule(masses: Sequence[Fraction | str], alphabet_size: int = 2) -> IidRule:
    ms = tuple(Fraction(m) for m in masses)
    return IidRule(
        reads=frozenset({READ_RANDOMNESS}),
        memory=0,
        bits_per_step=2,
        alphabet_size=alphabet_size,
        masses=ms,
    )


@dataclass(frozen=True)
class RawBitRule(Rule):
    """Emit the step's first raw bit; under a shared stream two of these coincide."""

    def next_symbol(self, views: RuleViews, bits: BitStream) -> int:
        return bits.next_bit()

    def descriptor(self) -> dict:
        return {"type": "raw_bit"}


def raw_bit_rule() -> RawBitRule:
    return RawBitRule(reads=frozenset({READ_RANDOMNESS}), memory=0, bits_per_step=1)


@dataclass(frozen=True)
class CopyRule(Rule):
    """Repeat a source symbol with the given fidelity, else draw uniformly elsewhere.

    source "other" with lag 0 reads the other series' current symbol; lag 1
    its previous symbol; source "own" repeats this series' own lag-1 symbol.
    Steps with no source symbol yet emit `initial`.
    """

    source: str = "other"
    lag: int = 1
    fidelity: Fraction = ONE
    initial: int = 0

    def _source_symbol(self, views: RuleViews) -> int | None:
        if self.source == "own":
            past = views.own_past
            lag = self.lag
        elif self.lag == 0:
            return views.other_current
        else:
            past = views.other_past
            lag = self.lag
        if past is None or len(past) < lag:
            return None
        return past[-lag]

    def next_symbol(self, views: RuleViews, bits: BitStream) -> int:
        src = self._source_symbol(views)
        if src is None:
            return self.initial
        if self.fidelity == 1:
            return src
        flip = draw_symbol((ONE - self.fidelity, self.fidelity), bits)
        if flip == 1:
            return src
        others = [s for s in range(self.alphabet_size) if s != src]
        if len(others) == 1:
            return others[0]
        pick = draw_symbol([Fraction(1, len(others))] * len(others), bits)
        return others[pick]

    def descriptor(self) -> dict:
        return {
            "type": "copy",
            "source": self.source,
            "lag": self.lag,
            "fidelity": str(self.fidelity),
            "initial": self.initial,
        }


def copy_rule(
    source: str = "other",
    lag: int = 1,
    fidelity: Fraction | str = ONE,
    initial: int = 0,
    alphabet_size: int = 2,
) -> CopyRule:
    fidelity = Fraction(fidelity)
    if not 0 <= fidelity <= 1:
        raise InputError("fidelity must lie in [0, 1]")
    if source not in ("other", "own"):
        raise InputError("copy source must be 'other' or 'own'")
    if lag < 0 or (source == "own" and lag < 1):
        raise InputError("invalid lag")
    reads = {READ_RANDOMNESS} if fidelity < 1 else set()
    if source == "own":
        reads.add(READ_OWN_PAST)
    elif lag == 0:
        reads.add(READ_OTHER_CURRENT)
    else:
        reads.add(READ_OTHER_PAST)
    return CopyRule(
        reads=frozenset(reads),
        memory=max(lag, 1),
        bits_per_step=2 if fidelity < 1 else 0,
        alphabet_size=alphabet_size,
        source=source,
        lag=lag,
        fidelity=fidelity,
        initial=initial,
    )


@dataclass(frozen=True)
class TableRule(Rule):
    """Explicit context table over (own window, other window [, other current])."""

    own_window: int = 0
    other_window: int = 0
    include_other_current: bool = False
    rows: Mapping[tuple[Word, Word, int | None], tuple[Fraction, ...]] = field(default_factory=dict)

    def next_symbol(self, views: RuleViews, bits: BitStream) -> int:
        own = (views.own_past or ())[len(views.own_past or ()) - min(self.own_window, len(views.own_past or ())):]
        other_src = views.other_past or ()
        other = other_src[len(other_src) - min(self.other_window, len(other_src)):]
        current = views.other_current if self.include_other_current else None
        try:
            row = self.rows[(own, other, current)]
        except KeyError:
            raise InputError(f"table rule missing context {(own, other, current)}") from None
        return draw_symbol(row, bits)

    def descriptor(self) -> dict:
        return {
            "type": "table",
            "own_window": self.own_window,
            "other_window": self.other_window,
            "include_other_current": self.include_other_current,
        }


def table_rule(
    rows: Mapping,
    own_window: int = 0,
    other_window: int = 0,
    include_other_current: bool = False,
    alphabet_size: int = 2,
) -> TableRule:
    reads = {READ_RANDOMNESS}
    if own_window:
        reads.add(READ_OWN_PAST)
    if other_window:
        reads.add(READ_OTHER_PAST)
    if include_other_current:
        reads.add(READ_OTHER_CURRENT)
    clean = {}
    for (own, other, cur), dist in rows.items():
        clean[(tuple(own), tuple(other), cur)] = tuple(Fraction(m) for m in dist)
    return TableRule(
        reads=frozenset(reads),
        memory=max(own_window, other_window, 1),
        bits_per_step=2,
        alphabet_size=alphabet_size,
        own_window=own_window,
        other_window=other_window,
        include_other_current=include_other_current,
        rows=clean,
    )


# ---------------------------------------------------------------------------
# model classes and the simulator
# ---------------------------------------------------------------------------

class ModelClass(str, enum.Enum):
    INSTANTANEOUS_CAUSE = "instantaneous-cause"  # x may instantaneously cause y
    STRICT_CAUSAL = "strict-causal"
    INFLUENCE_FREE = "influence-free"  # x is influence-free of y
    HIDDEN_VARIABLES = "hidden-variables"


ALLOWED_READS: Mapping[ModelClass, tuple[frozenset[str], frozenset[str]]] = {
    ModelClass.INSTANTANEOUS_CAUSE: (
        frozenset({READ_OWN_PAST, READ_OTHER_PAST, READ_RANDOMNESS}),
        frozenset({READ_OWN_PAST, READ_OTHER_PAST, READ_OTHER_CURRENT, READ_RANDOMNESS}),
    ),
    ModelClass.STRICT_CAUSAL: (
        frozenset({READ_OWN_PAST, READ_OTHER_PAST, READ_RANDOMNESS}),
        frozenset({READ_OWN_PAST, READ_OTHER_PAST, READ_RANDOMNESS}),
    ),
    ModelClass.INFLUENCE_FREE: (
        frozenset({READ_OWN_PAST, READ_RANDOMNESS}),
        frozenset({READ_OWN_PAST, READ_OTHER_PAST, READ_OTHER_CURRENT, READ_RANDOMNESS}),
    ),
    ModelClass.HIDDEN_VARIABLES: (
        frozenset({READ_RANDOMNESS}),
        frozenset({READ_RANDOMNESS}),
    ),
}


@dataclass(frozen=True)
class StructuralModel:
    model_class: ModelClass
    x_rule: Rule
    y_rule: Rule
    alphabet_size: int = 2

    def __post_init__(self):
        allowed_x, allowed_y = ALLOWED_READS[self.model_class]
        if not self.x_rule.reads <= allowed_x:
            raise InputError(
                f"x rule reads {sorted(self.x_rule.reads - allowed_x)}, "
                f"forbidden for class {self.model_class.value}"
            )
        if not self.y_rule.reads <= allowed_y:
            raise InputError(
                f"y rule reads {sorted(self.y_rule.reads - allowed_y)}, "
                f"forbidden for class {self.model_class.value}"
            )

    def descriptor(self) -> dict:
        return {
            "class": self.model_class.value,
            "alphabet": self.alphabet_size,
            "rules": {"x": self.x_rule.descriptor(), "y": self.y_rule.descriptor()},
        }


@dataclass(frozen=True)
class TimeseriesPair:
    x: tuple[int, ...]
    y: tuple[int, ...]
    alphabet_size: int = 2
    provenance: Mapping | None = None

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise InputError("series lengths differ")
        for sym in self.x + self.y:
            if not 0 <= sym < self.alphabet_size:
                raise InputError(f"symbol {sym} out of range")

    def __len__(self) -> int:
        return len(self.x)


def _views_for(rule: Rule, own: list[int], other: list[int], other_current: int | None) -> RuleViews:
    return RuleViews(
        own_past=tuple(own) if READ_OWN_PAST in rule.reads else None,
        other_past=tuple(other) if READ_OTHER_PAST in rule.reads else None,
        other_current=other_current if READ_OTHER_CURRENT in rule.reads else None,
    )


def simulate(model: StructuralModel, n: int, seed: int) -> TimeseriesPair:
    """Run the model for n steps; identical (model, n, seed) gives identical output.

    Each step has its own derived bit stream per series (one shared stream
    for the hidden-variables class); x updates before y, so y's rule may see
    x's current symbol when its class allows it.
    """
    if n < 1:
        raise InputError("need at least one step")
    shared = model.model_class is ModelClass.HIDDEN_VARIABLES
    master_x = random.Random(f"simulate|{seed}|x")
    master_y = master_x if shared else random.Random(f"simulate|{seed}|y")
    xs: list[int] = []
    ys: list[int] = []
    for _ in range(n):
        step_seed_x = master_x.getrandbits(64)
        step_seed_y = step_seed_x if shared else master_y.getrandbits(64)
        x_sym = model.x_rule.next_symbol(
            _views_for(model.x_rule, xs, ys, None), BitStream(step_seed_x)
        )
        y_sym = model.y_rule.next_symbol(
            _views_for(model.y_rule, ys, xs, x_sym), BitStream(step_seed_y)
        )
        xs.append(x_sym)
        ys.append(y_sym)
    return TimeseriesPair(
        tuple(xs),
        tuple(ys),
        model.alphabet_size,
        provenance={"model": model.descriptor(), "seed": seed, "n": n},
    )


# ---------------------------------------------------------------------------
# timeseries files
# ---------------------------------------------------------------------------

def export_timeseries(pair: TimeseriesPair, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "y"])
        for a, b in zip(pair.x, pair.y):
            writer.writerow([a, b])


def ingest_timeseries(path, alphabet_size: int = 2) -> TimeseriesPair:
    """Read a two-column CSV with header x,y; errors name the offending row."""
    try:
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise InputError(f"cannot read timeseries file {path}: {exc}") from exc
    if not rows:
        raise InputError(f"timeseries file {path} is empty")
    header = [cell.strip() for cell in rows[0]]
    if header != ["x", "y"]:
        raise InputError(f"timeseries file {path} must start with header x,y")
    if len(rows) == 1:
        raise InputError(f"timeseries file {path} has no data rows")
    xs: list[int] = []
    ys: list[int] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise InputError(f"row {lineno}: expected two columns, got {len(row)}")
        try:
            a, b = int(row[0]), int(row[1])
        except ValueError:
            raise InputError(f"row {lineno}: symbols must be integers") from None
        for sym in (a, b):
            if not 0 <= sym < alphabet_size:
                raise InputError(
                    f"row {lineno}: symbol {sym} out of range for alphabet {alphabet_size}"
                )
        xs.append(a)
        ys.append(b)
    return TimeseriesPair(tuple(xs), tuple(ys), alphabet_size, provenance={"source": str(path)})
