"""The grow constructions: load-node reweighting and its verification lemmas.

`grow` halves every leaf of a binary even-depth semimeasure except those
descending from a load node, which keep full mass. The load nodes hang off
the local minimal branch (the root-to-leaf path that always descends into
the child of smaller prefix mass) at even depths. Along that branch the
odd/even prefix-mass ratios of the output beat the input's by a factor 6/5
per step, which is the amplification the construction exists for; viewing
depth 2n as interleaved pairs, the amplified ratios are exactly the causal
conditionals.

`grow_semimeasure` lifts grow to a monotone stage-indexed enumeration: the
output is re-grown with a doubled power-of-two scale whenever the input's
total mass has risen by more than nu = min initial leaf mass, and is
ratio-scaled leafwise in between; outputs are leafwise nondecreasing across
all stages. The sandwich check bounds how much a small mass increase can
move the causal conditionals at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InputError, UNDEFINED
from .mixture import staircase_from_bivariate
from .semimeasure import Semimeasure, Word, deinterleave, iter_words

ZERO = Fraction(0)
ONE = Fraction(1)


def _require_binary_even(P: Semimeasure, what: str):
    if P.alphabet_size != 2:
        raise InputError(f"{what} is defined for the binary alphabet only")
    if P.depth % 2 != 0:
        raise InputError(f"{what} needs an even depth (interleaved pairs)")


def local_minimal_branch(P: Semimeasure) -> Word:
    """The branch that always descends into the child of smaller prefix mass.

    Ties break toward symbol 0, so the branch is unique and deterministic.
    """
    if P.alphabet_size != 2:
        raise InputError("local minimal branch is defined for the binary alphabet only")
    branch: list[int] = []
    for _ in range(P.depth):
        zero_child = P.prefix_mass(tuple(branch) + (0,))
        one_child = P.prefix_mass(tuple(branch) + (1,))
        branch.append(0 if zero_child <= one_child else 1)
    return tuple(branch)


@dataclass(frozen=True)
class GrowTrace:
    """Everything Algorithm `grow` did: branch, load nodes, classes, output."""

    source: Semimeasure
    branch: Word
    load_nodes: tuple[Word, ...]
    output: Semimeasure
    leaf_classes: tuple[str, ...]  # "load" | "halved", in leaf order

    def to_json_dict(self) -> dict:
        from .semimeasure import format_rational

        return {
            "depth": self.source.depth,
            "branch": "".join(map(str, self.branch)),
            "load_nodes": ["".join(map(str, node)) for node in self.load_nodes],
            "leaf_classes": list(self.leaf_classes),
            "before": [format_rational(m) for m in self.source.leaf_mass],
            "after": [format_rational(m) for m in self.output.leaf_mass],
        }


def grow(P: Semimeasure) -> GrowTrace:
    """Halve every leaf except those under a load node, which keep full mass."""
    _require_binary_even(P, "grow")
    n = P.depth // 2
    z = local_minimal_branch(P)
    load_nodes = tuple(z[: 2 * i + 1] + (1 - z[2 * i + 1],) for i in range(n))
    classes = []
    leaves = []
    for idx, w in enumerate(iter_words(P.depth, 2)):
        if any(w[: len(node)] == node for node in load_nodes):
            classes.append("load")
            leaves.append(P.leaf_mass[idx])
        else:
            classes.append("halved")
            leaves.append(P.leaf_mass[idx] / 2)
    return GrowTrace(P, z, load_nodes, Semimeasure(P.depth, 2, tuple(leaves)), tuple(classes))


@dataclass(frozen=True)
class AmplificationReport:
    holds: bool
    step_factors: tuple[Fraction | None, ...]  # Q-ratio / P-ratio per branch step, None if undefined
    undefined_steps: tuple[int, ...]

    @property
    def all_defined(self) -> bool:
        return not self.undefined_steps


def amplification_check(trace: GrowTrace) -> AmplificationReport:
    """Verify Q(z^{2i+1})/Q(z^{2i}) >= (6/5) P(z^{2i+1})/P(z^{2i}) along the branch."""
    P = trace.source
    Q = trace.output
    z = trace.branch
    n = P.depth // 2
    factors: list[Fraction | None] = []
    undefined: list[int] = []
    holds = True
    threshold = Fraction(6, 5)
    for i in range(n):
        p_hi = P.prefix_mass(z[: 2 * i + 1])
        p_lo = P.prefix_mass(z[: 2 * i])
        q_hi = Q.prefix_mass(z[: 2 * i + 1])
        q_lo = Q.prefix_mass(z[: 2 * i])
        if p_lo == 0 or q_lo == 0 or p_hi == 0:
            factors.append(None)
            undefined.append(i)
            continue
        factor = (q_hi / q_lo) / (p_hi / p_lo)
        factors.append(factor)
        if factor < threshold:
            holds = False
    return AmplificationReport(holds, tuple(factors), tuple(undefined))


def branch_causal_amplification(trace: GrowTrace) -> Fraction | None:
    """Q(x|y^) / P(x|y^) for the deinterleaved pair realized by the branch.

    This is the product of the per-step factors, at least (6/5)^n when the
    per-step bound holds; None when some step is undefined.
    """
    report = amplification_check(trace)
    if not report.all_defined:
        return None
    value = ONE
    for factor in report.step_factors:
        value *= factor
    return value


# ---------------------------------------------------------------------------
# stage-indexed enumeration (Algorithm 2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnumerationStream:
    """Stage-indexed leafwise-nondecreasing tables with positive initial mass."""

    tables: tuple[Semimeasure, ...]

    def __post_init__(self):
        if not self.tables:
            raise InputError("an enumeration stream needs at least one table")
        first = self.tables[0]
        for t in self.tables:
            if t.depth != first.depth or t.alphabet_size != first.alphabet_size:
                raise InputError("stream tables must share one shape")
        for prev, nxt in zip(self.tables, self.tables[1:]):
            if any(b < a for a, b in zip(prev.leaf_mass, nxt.leaf_mass)):
                raise InputError("stream tables must be leafwise nondecreasing")

    @property
    def nu(self) -> Fraction:
        return min(self.tables[0].leaf_mass)

    def table(self, t: int) -> Semimeasure:
        return self.tables[min(t, len(self.tables) - 1)]


@dataclass(frozen=True)
class GrowStage:
    t: int
    stage: int
    output: Semimeasure


def grow_semimeasure(stream: EnumerationStream, t_max: int) -> list[GrowStage]:
    """Algorithm 2: re-grow on mass jumps above nu, ratio-scale in between.

    The scale factor is the exact power of two 2^(s - ceil(1/nu)), which
    stays at most 1 since the stage count cannot exceed ceil(1/nu).
    """
    nu = stream.nu
    if nu <= 0:
        raise InputError("grow_semimeasure needs strictly positive initial leaves")
    _require_binary_even(stream.tables[0], "grow_semimeasure")
    ceil_inv_nu = -((-nu.denominator) // nu.numerator)  # ceil(1/nu), exact
    scale = Fraction(1, 2**ceil_inv_nu)
    anchor = stream.table(0).total()
    stage = 0
    current = grow(stream.table(0).scaled(scale)).output
    out = [GrowStage(0, 0, current)]
    for t in range(1, t_max + 1):
        table = stream.table(t)
        prev = stream.table(t - 1)
        if table.total() - anchor > nu:
            anchor = table.total()
            stage += 1
            scale = Fraction(2**stage, 2**ceil_inv_nu)
            current = grow(table.scaled(scale)).output
        else:
            leaves = []
            for q, new, old in zip(current.leaf_mass, table.leaf_mass, prev.leaf_mass):
                if old == 0:
                    leaves.append(q)  # cannot ratio-scale from zero; keep (stays monotone)
                else:
                    leaves.append(q * new / old)
            current = Semimeasure(current.depth, 2, tuple(leaves))
        out.append(GrowStage(t, stage, current))
    return out


class SandwichOutcome:
    """Three-valued result: the bound can fail, hold, or not apply at all."""

    def __init__(self, label: str):
        self.label = label

    def __repr__(self) -> str:
        return f"Sandwich({self.label})"

    def __bool__(self) -> bool:
        return self.label == "true"


SANDWICH_TRUE = SandwichOutcome("true")
SANDWICH_FALSE = SandwichOutcome("false")
SANDWICH_INAPPLICABLE = SandwichOutcome("inapplicable")


def sandwich_check(P: Semimeasure, Q: Semimeasure, nu: Fraction) -> SandwichOutcome:
    """Verify 1/2 <= Q(x|y^)/P(x|y^) <= 2 for every deinterleaved pair.

    Applies only when P >= nu leafwise, Q >= P leafwise, and the total grew
    by at most nu; otherwise INAPPLICABLE (which is not a failure).
    """
    _require_binary_even(P, "sandwich_check")
    nu = Fraction(nu)
    if P.depth != Q.depth or P.alphabet_size != Q.alphabet_size:
        raise InputError("sandwich_check needs matching shapes")
    if any(m < nu for m in P.leaf_mass):
        return SANDWICH_INAPPLICABLE
    if any(q < p for p, q in zip(P.leaf_mass, Q.leaf_mass)):
        return SANDWICH_INAPPLICABLE
    if Q.total() > P.total() + nu:
        return SANDWICH_INAPPLICABLE
    bp = deinterleave(P)
    bq = deinterleave(Q)
    half, two = Fraction(1, 2), Fraction(2)
    for x in iter_words(bp.depth, 2):
        for y in iter_words(bp.depth, 2):
            p_val = staircase_from_bivariate(bp, x, y).causal_x_given_y()
            q_val = staircase_from_bivariate(bq, x, y).causal_x_given_y()
            if p_val is UNDEFINED or q_val is UNDEFINED or p_val == 0:
                continue  # positivity of P makes this unreachable; guard anyway
            ratio = q_val / p_val
            if not half <= ratio <= two:
                return SANDWICH_FALSE
    return SANDWICH_TRUE
