"""Exact mass functions on finite string trees.

A length-conditional semimeasure assigns a nonnegative rational mass to every
string of a fixed length n over a finite alphabet, with total mass at most 1.
Masses of shorter prefixes are derived by summing over extensions, so mass
conservation (a node's mass equals the sum of its children) holds by
construction. All arithmetic in this module is exact `fractions.Fraction`;
floats appear only in the estimator modules.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InputError, UNDEFINED

Word = tuple[int, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_word(value: str | Sequence[int], alphabet_size: int = 2) -> Word:
    """Coerce a symbol sequence ("0110" or [0,1,1,0]) to a tuple of ints."""
    if isinstance(value, str):
        word = tuple(int(ch) for ch in value)
    else:
        word = tuple(int(v) for v in value)
    for sym in word:
        if not 0 <= sym < alphabet_size:
            raise InputError(f"symbol {sym} out of range for alphabet size {alphabet_size}")
    return word


def word_index(word: Word, alphabet_size: int) -> int:
    idx = 0
    for sym in word:
        idx = idx * alphabet_size + sym
    return idx


def iter_words(length: int, alphabet_size: int = 2) -> Iterator[Word]:
    """All words of the given length in lexicographic order."""
    if length == 0:
        yield ()
        return
    for head in iter_words(length - 1, alphabet_size):
        for sym in range(alphabet_size):
            yield head + (sym,)


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse rational {text!r}") from exc


def _validate_leaves(leaves: Sequence[Fraction], count: int, what: str) -> tuple[Fraction, ...]:
    masses = tuple(Fraction(m) for m in leaves)
    if len(masses) != count:
        raise InputError(f"{what} needs {count} leaf masses, got {len(masses)}")
    if any(m < 0 for m in masses):
        raise InputError(f"{what} has a negative leaf mass")
    if sum(masses, ZERO) > 1:
        raise InputError(f"{what} has total mass above 1")
    return masses


@dataclass(frozen=True)
class Semimeasure:
    """Exact mass on the leaves of a depth-n tree, total at most 1."""

    depth: int
    alphabet_size: int
    leaf_mass: tuple[Fraction, ...]

    def __post_init__(self):
        if self.depth < 0:
            raise InputError("depth must be nonnegative")
        if self.alphabet_size < 2:
            raise InputError("alphabet size must be at least 2")
        masses = _validate_leaves(self.leaf_mass, self.alphabet_size**self.depth, "semimeasure")
        object.__setattr__(self, "leaf_mass", masses)

    @classmethod
    def from_leaves(cls, leaves: Sequence[Fraction | int | str], alphabet_size: int = 2) -> "Semimeasure":
        masses = [Fraction(m) for m in leaves]
        depth = 0
        while alphabet_size**depth < len(masses):
            depth += 1
        return cls(depth, alphabet_size, tuple(masses))

    @classmethod
    def uniform(cls, depth: int, alphabet_size: int = 2, total: Fraction = ONE) -> "Semimeasure":
        count = alphabet_size**depth
        return cls(depth, alphabet_size, (Fraction(total) / count,) * count)

    @cached_property
    def _levels(self) -> tuple[tuple[Fraction, ...], ...]:
        # levels[i][word_index] = prefix mass at depth i, built bottom-up
        levels = [self.leaf_mass]
        current = self.leaf_mass
        for _ in range(self.depth):
            a = self.alphabet_size
            current = tuple(
                sum(current[i * a + s] for s in range(a)) for i in range(len(current) // a)
            )
            levels.append(current)
        levels.reverse()
        return tuple(levels)

    def total(self) -> Fraction:
        return self._levels[0][0]

    def leaf(self, word: str | Sequence[int]) -> Fraction:
        w = as_word(word, self.alphabet_size)
        if len(w) != self.depth:
            raise InputError(f"leaf word must have length {self.depth}")
        return self.leaf_mass[word_index(w, self.alphabet_size)]

    def prefix_mass(self, prefix: str | Sequence[int]) -> Fraction:
        """Mass of all leaves extending the prefix; the empty prefix gives the total."""
        p = as_word(prefix, self.alphabet_size)
        if len(p) > self.depth:
            raise InputError(f"prefix longer than depth {self.depth}")
        return self._levels[len(p)][word_index(p, self.alphabet_size)]

    def scaled(self, factor: Fraction) -> "Semimeasure":
        factor = Fraction(factor)
        if factor < 0 or factor > 1:
            raise InputError("scale factor must lie in [0, 1]")
        return Semimeasure(self.depth, self.alphabet_size, tuple(m * factor for m in self.leaf_mass))

    def mass(self, word: str | Sequence[int]) -> Fraction:
        """Alias used by mixture components; equals leaf()."""
        return self.leaf(word)

    def to_json_dict(self) -> dict:
        return {
            "depth": self.depth,
            "alphabet": self.alphabet_size,
            "total_hint": format_rational(self.total()),
            "leaves": [format_rational(m) for m in self.leaf_mass],
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "Semimeasure":
        try:
            depth = int(doc["depth"])
            alphabet = int(doc["alphabet"])
            leaves = [parse_rational(t) for t in doc["leaves"]]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed semimeasure document: {exc}") from exc
        return cls(depth, alphabet, tuple(leaves))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Semimeasure":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class BivariateSemimeasure:
    """Exact mass on pairs (x, y) of equal-length words, total at most 1."""

    depth: int
    alphabet_size: int
    pair_masses: tuple[Fraction, ...]  # index = word_index(x)*A^n + word_index(y)

    def __post_init__(self):
        if self.depth < 0:
            raise InputError("depth must be nonnegative")
        if self.alphabet_size < 2:
            raise InputError("alphabet size must be at least 2")
        count = self.alphabet_size ** (2 * self.depth)
        masses = _validate_leaves(self.pair_masses, count, "bivariate semimeasure")
        object.__setattr__(self, "pair_masses", masses)

    @classmethod
    def uniform(cls, depth: int, alphabet_size: int = 2, total: Fraction = ONE) -> "BivariateSemimeasure":
        count = alphabet_size ** (2 * depth)
        return cls(depth, alphabet_size, (Fraction(total) / count,) * count)

    @classmethod
    def from_function(cls, depth: int, fn, alphabet_size: int = 2) -> "BivariateSemimeasure":
        masses = [fn(x, y) for x in iter_words(depth, alphabet_size) for y in iter_words(depth, alphabet_size)]
        return cls(depth, alphabet_size, tuple(Fraction(m) for m in masses))

    @cached_property
    def _grids(self) -> dict[tuple[int, int], tuple[Fraction, ...]]:
        # _grids[(i, j)][xi_index * A^j + yj_index] = P(x^i, y^j)
        a = self.alphabet_size
        n = self.depth
        grids = {(n, n): self.pair_masses}
        # collapse the y coordinate first, then the x coordinate per row count
        for j in range(n - 1, -1, -1):
            prev = grids[(n, j + 1)]
            width = a ** (j + 1)
            grids[(n, j)] = tuple(
                sum(prev[row * width + col * a + s] for s in range(a))
                for row in range(a**n)
                for col in range(a**j)
            )
        for j in range(n, -1, -1):
            for i in range(n - 1, -1, -1):
                prev = grids[(i + 1, j)]
                width = a**j
                grids[(i, j)] = tuple(
                    sum(prev[(row * a + s) * width + col] for s in range(a))
                    for row in range(a**i)
                    for col in range(width)
                )
        return grids

    def total(self) -> Fraction:
        return self._grids[(0, 0)][0]

    def pair_mass(self, x: str | Sequence[int], y: str | Sequence[int]) -> Fraction:
        xw = as_word(x, self.alphabet_size)
        yw = as_word(y, self.alphabet_size)
        if len(xw) != self.depth or len(yw) != self.depth:
            raise InputError("pair_mass takes full-depth words")
        a = self.alphabet_size
        return self.pair_masses[word_index(xw, a) * a**self.depth + word_index(yw, a)]

    def prefix_pair_mass(self, xp: str | Sequence[int], yp: str | Sequence[int]) -> Fraction:
        """P(x^i, y^j): mass of all pairs extending the prefix pair."""
        xw = as_word(xp, self.alphabet_size)
        yw = as_word(yp, self.alphabet_size)
        if len(xw) > self.depth or len(yw) > self.depth:
            raise InputError(f"prefix longer than depth {self.depth}")
        a = self.alphabet_size
        grid = self._grids[(len(xw), len(yw))]
        return grid[word_index(xw, a) * a ** len(yw) + word_index(yw, a)]

    def x_marginal(self) -> Semimeasure:
        leaves = tuple(self.prefix_pair_mass(x, ()) for x in iter_words(self.depth, self.alphabet_size))
        return Semimeasure(self.depth, self.alphabet_size, leaves)

    def y_marginal(self) -> Semimeasure:
        leaves = tuple(self.prefix_pair_mass((), y) for y in iter_words(self.depth, self.alphabet_size))
        return Semimeasure(self.depth, self.alphabet_size, leaves)

    def swapped(self) -> "BivariateSemimeasure":
        """The same mass with the roles of x and y exchanged."""
        a = self.alphabet_size
        size = a**self.depth
        masses = tuple(
            self.pair_masses[xi * size + yi] for yi in range(size) for xi in range(size)
        )
        return BivariateSemimeasure(self.depth, self.alphabet_size, masses)

    def conditional_x_given_y(self) -> "ConditionalSemimeasure":
        """P(x | y) = P(x, y) / P(y); conditions with zero marginal become gaps."""
        kernel = {}
        for y in iter_words(self.depth, self.alphabet_size):
            py = self.prefix_pair_mass((), y)
            if py == 0:
                continue
            leaves = tuple(
                self.pair_mass(x, y) / py for x in iter_words(self.depth, self.alphabet_size)
            )
            kernel[y] = Semimeasure(self.depth, self.alphabet_size, leaves)
        return ConditionalSemimeasure(self.depth, self.alphabet_size, kernel)

    def conditional_y_given_x(self) -> "ConditionalSemimeasure":
        return self.swapped().conditional_x_given_y()

    def to_json_dict(self) -> dict:
        return {
            "depth": self.depth,
            "alphabet": self.alphabet_size,
            "total_hint": format_rational(self.total()),
            "pair_masses": [format_rational(m) for m in self.pair_masses],
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "BivariateSemimeasure":
        try:
            depth = int(doc["depth"])
            alphabet = int(doc["alphabet"])
            masses = [parse_rational(t) for t in doc["pair_masses"]]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed bivariate document: {exc}") from exc
        return cls(depth, alphabet, tuple(masses))


@dataclass(frozen=True)
class ConditionalSemimeasure:
    """A per-condition family of semimeasures P(x | y).

    The kernel may be partial: conditions absent from the mapping are gaps
    (the conditioned object is undefined there), never silently zero.
    """

    depth: int
    alphabet_size: int
    kernel: Mapping[Word, Semimeasure]

    def __post_init__(self):
        clean = {}
        for cond, sm in self.kernel.items():
            w = as_word(cond, self.alphabet_size)
            if len(w) != self.depth:
                raise InputError("condition length must equal depth")
            if sm.depth != self.depth or sm.alphabet_size != self.alphabet_size:
                raise InputError("conditioned semimeasure shape mismatch")
            clean[w] = sm
        object.__setattr__(self, "kernel", clean)

    def conditions(self) -> Iterator[Word]:
        return iter_words(self.depth, self.alphabet_size)

    def has(self, cond: Word) -> bool:
        return cond in self.kernel

    def mass(self, x: str | Sequence[int], cond: str | Sequence[int]):
        c = as_word(cond, self.alphabet_size)
        if c not in self.kernel:
            return UNDEFINED
        return self.kernel[c].leaf(x)

    def prefix_mass(self, xp: str | Sequence[int], cond: str | Sequence[int]):
        c = as_word(cond, self.alphabet_size)
        if c not in self.kernel:
            return UNDEFINED
        return self.kernel[c].prefix_mass(xp)

    def total(self, cond: str | Sequence[int]):
        c = as_word(cond, self.alphabet_size)
        if c not in self.kernel:
            return UNDEFINED
        return self.kernel[c].total()


def prefix_mass(P: Semimeasure | BivariateSemimeasure, prefix) -> Fraction:
    """Prefix mass for either kind of semimeasure; bivariate takes a pair of prefixes."""
    if isinstance(P, BivariateSemimeasure):
        xp, yp = prefix
        return P.prefix_pair_mass(xp, yp)
    return P.prefix_mass(prefix)


def conditional_prefix_ratio(P: BivariateSemimeasure, x, y, i: int, j: int, k: int, l: int):
    """P(x^i, y^j | x^k, y^l) as an exact ratio of prefix-pair masses.

    Returns UNDEFINED when the conditioning mass vanishes.
    """
    xw = as_word(x, P.alphabet_size)
    yw = as_word(y, P.alphabet_size)
    if not (0 <= k <= i <= P.depth and 0 <= l <= j <= P.depth):
        raise InputError("indices must satisfy k <= i <= n and l <= j <= n")
    denom = P.prefix_pair_mass(xw[:k], yw[:l])
    if denom == 0:
        return UNDEFINED
    return P.prefix_pair_mass(xw[:i], yw[:j]) / denom


def product(P: Semimeasure, Q: Semimeasure) -> BivariateSemimeasure:
    """Independent product: mass(x, y) = P(x) * Q(y)."""
    if P.alphabet_size != Q.alphabet_size:
        raise InputError("product requires a common alphabet")
    if P.depth != Q.depth:
        raise InputError("product requires equal depths (the pair type is square)")
    masses = tuple(px * qy for px in P.leaf_mass for qy in Q.leaf_mass)
    return BivariateSemimeasure(P.depth, P.alphabet_size, masses)


def interleave(P: BivariateSemimeasure) -> Semimeasure:
    """Map pair mass (x, y) to the single string z = x1 y1 x2 y2 ... (binary only)."""
    if P.alphabet_size != 2:
        raise InputError("interleaving is defined for the binary alphabet only")
    n = P.depth
    size = 2**n
    leaves = [ZERO] * (4**n)
    for xi in range(size):
        for yi in range(size):
            z = 0
            for bit in range(n):
                z = (z << 1) | ((xi >> (n - 1 - bit)) & 1)
                z = (z << 1) | ((yi >> (n - 1 - bit)) & 1)
            leaves[z] = P.pair_masses[xi * size + yi]
    return Semimeasure(2 * n, 2, tuple(leaves))


def deinterleave(S: Semimeasure) -> BivariateSemimeasure:
    """Inverse of interleave; requires even depth and a binary alphabet."""
    if S.alphabet_size != 2:
        raise InputError("deinterleaving is defined for the binary alphabet only")
    if S.depth % 2 != 0:
        raise InputError("deinterleave requires an even depth")
    n = S.depth // 2
    size = 2**n
    masses = [ZERO] * (size * size)
    for z in range(4**n):
        xi = 0
        yi = 0
        for bit in range(n):
            xi = (xi << 1) | ((z >> (2 * n - 1 - 2 * bit)) & 1)
            yi = (yi << 1) | ((z >> (2 * n - 2 - 2 * bit)) & 1)
        masses[xi * size + yi] = S.leaf_mass[z]
    return BivariateSemimeasure(n, 2, tuple(masses))


def _random_leaves(
    rng: random.Random,
    count: int,
    strictly_positive: bool,
    total: Fraction,
) -> tuple[Fraction, ...]:
    # Small integer numerators keep downstream Fraction arithmetic cheap.
    weights = []
    for _ in range(count):
        if not strictly_positive and rng.random() < 0.25:
            weights.append(0)
        else:
            weights.append(rng.randint(1, 64))
    if sum(weights) == 0:
        weights[rng.randrange(count)] = 1
    denom = sum(weights)
    return tuple(Fraction(w, denom) * total for w in weights)


def random_semimeasure(
    seed: int,
    depth: int,
    alphabet_size: int = 2,
    strictly_positive: bool = False,
    total: Fraction = ONE,
) -> Semimeasure:
    """Reproducible random semimeasure with the exact requested total mass."""
    total = Fraction(total)
    if total < 0 or total > 1:
        raise InputError("total must lie in [0, 1]")
    if depth < 0:
        raise InputError("depth must be nonnegative")
    # string seeds hash deterministically across processes, tuples do not
    rng = random.Random(f"semimeasure|{seed}|{depth}|{alphabet_size}|{strictly_positive}")
    leaves = _random_leaves(rng, alphabet_size**depth, strictly_positive, total)
    return Semimeasure(depth, alphabet_size, leaves)


def random_bivariate(
    seed: int,
    depth: int,
    alphabet_size: int = 2,
    strictly_positive: bool = False,
    total: Fraction = ONE,
) -> BivariateSemimeasure:
    """Reproducible random bivariate semimeasure with the exact requested total."""
    total = Fraction(total)
    if total < 0 or total > 1:
        raise InputError("total must lie in [0, 1]")
    rng = random.Random(f"bivariate|{seed}|{depth}|{alphabet_size}|{strictly_positive}")
    leaves = _random_leaves(rng, alphabet_size ** (2 * depth), strictly_positive, total)
    return BivariateSemimeasure(depth, alphabet_size, leaves)
