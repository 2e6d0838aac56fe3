"""Exact-identity self-test suites, runnable from the CLI.

Each suite replays a seeded corpus and checks an identity that must hold
with zero rational residue: the causal factorization, the swap
representation, the information-transfer decomposition, the Shannon
decomposition, agreement of the five equivalence predicates, and the grow
construction's two-case rule with its per-step amplification. Any violation
is a bug, never a tolerance issue.
"""

from __future__ import annotations

from fractions import Fraction

from .corpus import (
    random_instantaneous_causal,
    random_positive_bivariate,
    random_positive_semimeasure,
)
from .factorization import equivalence_suite, factorization_identity
from .grow import amplification_check, grow
from .influence import decomposition, swap_identity_holds
from .semimeasure import deinterleave, interleave, iter_words
from .shannon import shannon_sit


def _corpus_depths(depth: int, cases: int, seed: int):
    for case in range(cases):
        yield seed * 100003 + case, 1 + (case % depth)


def run_selftest(depth: int = 4, cases: int = 50, seed: int = 1) -> dict:
    """Run every suite; the report is deterministic for fixed arguments."""
    suites: dict[str, dict] = {}

    failures = 0
    for case_seed, d in _corpus_depths(depth, cases, seed):
        P = random_positive_bivariate(case_seed, d)
        holds, witness = factorization_identity(P)
        if not holds:
            failures += 1
    suites["factorization_identity"] = {"cases": cases, "failures": failures}

    failures = 0
    for case_seed, d in _corpus_depths(depth, cases, seed + 1):
        P = random_positive_bivariate(case_seed, d)
        for x in iter_words(d, 2):
            for y in iter_words(d, 2):
                if not swap_identity_holds(P, x, y):
                    failures += 1
    suites["swap_identity"] = {"cases": cases, "failures": failures}

    failures = 0
    for case_seed, d in _corpus_depths(depth, cases, seed + 2):
        P = random_positive_bivariate(case_seed, d)
        for x in iter_words(d, 2):
            for y in iter_words(d, 2):
                if not decomposition(P, x, y).exact_identity:
                    failures += 1
    suites["decomposition_identity"] = {"cases": cases, "failures": failures}

    failures = 0
    for case_seed, d in _corpus_depths(depth, cases, seed + 3):
        P = random_positive_bivariate(case_seed, d)
        if not shannon_sit(P).exact_identity:
            failures += 1
    suites["shannon_identity"] = {"cases": cases, "failures": failures}

    failures = 0
    half = max(1, cases // 2)
    for case_seed, d in _corpus_depths(min(depth, 3), half, seed + 4):
        P = random_instantaneous_causal(case_seed, d)
        report = equivalence_suite(P)
        if not (report.all_agree and report.x_influence_free_of_y):
            failures += 1
    for case_seed, d in _corpus_depths(min(depth, 3), half, seed + 5):
        P = random_positive_bivariate(case_seed, d)
        if not equivalence_suite(P).all_agree:
            failures += 1
    suites["equivalence_agreement"] = {"cases": 2 * half, "failures": failures}

    failures = 0
    for case_seed, d in _corpus_depths(depth, cases, seed + 6):
        even_depth = 2 * d
        P = random_positive_semimeasure(case_seed, even_depth)
        trace = grow(P)
        for idx, (klass, before, after) in enumerate(
            zip(trace.leaf_classes, P.leaf_mass, trace.output.leaf_mass)
        ):
            expected = before if klass == "load" else before / 2
            if after != expected:
                failures += 1
        if not amplification_check(trace).holds:
            failures += 1
        if trace.output.total() > P.total():
            failures += 1
    suites["grow_verification"] = {"cases": cases, "failures": failures}

    failures = 0
    for case_seed, d in _corpus_depths(depth, cases, seed + 7):
        P = random_positive_bivariate(case_seed, d)
        if deinterleave(interleave(P)).pair_masses != P.pair_masses:
            failures += 1
    suites["interleave_roundtrip"] = {"cases": cases, "failures": failures}

    total_failures = sum(s["failures"] for s in suites.values())
    return {
        "kind": "selftest",
        "depth": depth,
        "cases": cases,
        "seed": seed,
        "suites": suites,
        "failures": total_failures,
        "ok": total_failures == 0,
    }
