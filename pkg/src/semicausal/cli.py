"""Command-line surface binding the modules into reproducible runs.

Subcommands: simulate, analyze, test, grow, mixture, selftest. Every run
embeds its resolved configuration in the emitted report; reports are
byte-identical for identical inputs, flags, and seeds. Exit codes: 0 on
success, 1 on domain errors (with a machine-readable error JSON), 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .errors import InputError, SemicausalError
from .grow import grow
from .influence import (
    TEST_NAMES,
    decomposition,
    independent_decomposition,
    influence_tests,
    log2_fraction,
)
from .mixture import (
    BivariateMixture,
    build_mixture,
    markov_family,
    pair_family,
)
from .report import TestReport, dumps_report, write_json_atomic
from .selftest import run_selftest
from .semimeasure import Semimeasure, format_rational, random_semimeasure
from .shannon import granger_statistic, permutation_test, plugin_transfer
from .structural import (
    ModelClass,
    StructuralModel,
    copy_rule,
    export_timeseries,
    iid_rule,
    ingest_timeseries,
    raw_bit_rule,
    simulate,
)

EQUATION_ALIASES = {
    "7": "instantaneous_vs_strict",
    "8": "strict_vs_free",
    "9": "hidden_vs_instantaneous",
    "10": "hidden_vs_strict",
    "11": "hidden_vs_free",
}


def _clean_float(value):
    if value is None or not math.isfinite(value):
        return None
    return value


def parse_family(text: str) -> tuple[str, dict]:
    kind, _, args = text.partition(":")
    kind = kind.strip()
    params = {"k": 1, "g": 2}
    if args:
        for chunk in args.split(","):
            key, _, val = chunk.partition("=")
            if key.strip() not in ("k", "g") or not val:
                raise InputError(f"bad family parameter {chunk!r}")
            params[key.strip()] = int(val)
    if kind not in ("markov", "pair"):
        raise InputError(f"unknown family type {kind!r}")
    return kind, params


def rule_from_descriptor(doc: dict, alphabet: int, coupling: Fraction | None):
    kind = doc.get("type")
    if kind == "iid":
        return iid_rule([Fraction(p) for p in doc["p"]], alphabet)
    if kind == "raw_bit":
        return raw_bit_rule()
    if kind == "copy":
        fidelity = doc.get("fidelity")
        if fidelity is None:
            fidelity = coupling if coupling is not None else Fraction(1)
        return copy_rule(
            source=doc.get("source", "other"),
            lag=int(doc.get("lag", 1)),
            fidelity=Fraction(fidelity),
            initial=int(doc.get("initial", 0)),
            alphabet_size=alphabet,
        )
    raise InputError(f"unknown rule type {kind!r}")


def model_from_config(doc: dict) -> StructuralModel:
    try:
        klass = ModelClass(doc["class"])
        alphabet = int(doc.get("alphabet", 2))
        rules = doc["rules"]
        coupling = Fraction(doc["coupling"]) if "coupling" in doc else None
        x_rule = rule_from_descriptor(rules["x"], alphabet, coupling)
        y_rule = rule_from_descriptor(rules["y"], alphabet, coupling)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed model config: {exc}") from exc
    return StructuralModel(klass, x_rule, y_rule, alphabet)


def preset_model(name: str, coupling: Fraction) -> StructuralModel:
    fair = iid_rule([Fraction(1, 2), Fraction(1, 2)])
    if name == "independent":
        return StructuralModel(ModelClass.STRICT_CAUSAL, fair, iid_rule([Fraction(1, 2), Fraction(1, 2)]))
    if name == "lag1-copy":
        return StructuralModel(ModelClass.STRICT_CAUSAL, fair, copy_rule(lag=1, fidelity=coupling))
    if name == "instant-copy":
        return StructuralModel(ModelClass.INSTANTANEOUS_CAUSE, fair, copy_rule(lag=0, fidelity=coupling))
    if name == "hidden-shared":
        return StructuralModel(ModelClass.HIDDEN_VARIABLES, raw_bit_rule(), raw_bit_rule())
    raise InputError(f"unknown preset {name!r}")


def _load_json(path) -> dict:
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc


def _emit(doc: dict, out: str | None) -> None:
    if out:
        write_json_atomic(out, doc)
    else:
        sys.stdout.write(dumps_report(doc))


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    if args.model:
        model = model_from_config(_load_json(args.model))
    else:
        model = preset_model(args.preset, Fraction(args.coupling))
    pair = simulate(model, args.n, args.seed)
    export_timeseries(pair, args.out)
    return 0


def cmd_analyze(args) -> int:
    pair = ingest_timeseries(args.input, args.alphabet)
    stats = plugin_transfer(pair.x, pair.y, args.order, args.alphabet)
    granger_yx = granger_statistic(pair.x, pair.y, args.order)
    granger_xy = granger_statistic(pair.y, pair.x, args.order)
    flags = []
    p_values = {}
    if args.trials > 0:
        for name in ("sit_yx", "sit_xy"):
            res = permutation_test(
                name, pair.x, pair.y, args.trials, args.seed, args.perm,
                args.order, args.alphabet,
            )
            p_values[name] = res.p_value
    if granger_yx.rank_deficient or granger_xy.rank_deficient:
        flags.append("granger-rank-deficient")
    config = {
        "command": "analyze", "input": args.input, "order": args.order,
        "alphabet": args.alphabet, "trials": args.trials, "perm": args.perm,
        "seed": args.seed,
    }
    report = TestReport(
        statistic="transfer_decomposition",
        value_log2=_clean_float(stats.si),
        terms={k: _clean_float(v) for k, v in stats.terms().items()},
        p_value=p_values.get("sit_yx"),
        trials=args.trials or None,
        seed=args.seed,
        family={"type": "plugin-markov", "order": args.order, "alphabet": args.alphabet},
        flags=tuple(flags),
        config=config,
        extra={
            "granger": {
                "yx": granger_yx.value, "xy": granger_xy.value,
                "rank_deficient": granger_yx.rank_deficient or granger_xy.rank_deficient,
            },
            "p_values": p_values,
            "samples": stats.samples,
        },
    )
    _emit(report.to_json_dict(), args.out)
    return 0


def _build_pair_mixture(family_text: str, weights: str) -> BivariateMixture:
    kind, params = parse_family(family_text)
    if kind != "pair":
        raise InputError("the ideal tests need a pair family, e.g. pair:k=1,g=2")
    components = pair_family(params["k"], params["g"])
    descriptor = {"type": "pair", "order": params["k"], "grid": params["g"],
                  "size": len(components), "weights": weights}
    return BivariateMixture(components, params["g"], scheme=weights, descriptor=descriptor)


def cmd_test(args) -> int:
    name = EQUATION_ALIASES.get(args.name, args.name)
    if name not in TEST_NAMES:
        raise InputError(f"unknown test {args.name!r}; choose one of {', '.join(TEST_NAMES)}")
    pair = ingest_timeseries(args.input, 2)
    machinery = _build_pair_mixture(args.family, args.weights)
    results = influence_tests(pair.x, pair.y, machinery)
    outcome = results[name]
    flags = list(outcome.flags)
    terms = None
    extra_decompositions = {}
    try:
        assoc = decomposition(machinery, pair.x, pair.y)
        terms = {k: _clean_float(v) for k, v in assoc.terms().items()}
        # associated form: one shared evaluator, identity exact by telescoping
        extra_decompositions["associated"] = dict(terms)
        indep = independent_decomposition(pair.x, pair.y, machinery)
        extra_decompositions["independent"] = {
            **{k: _clean_float(v) for k, v in indep.terms().items()},
            "identity_residual": _clean_float(indep.identity_residual),
        }
        flags.append("associated-identity-exact")
        flags.append("independent-identity-approximate")
    except InputError:
        flags.append("decomposition-undefined")
    p_value = None
    if args.trials > 0:
        def stat(x, y, order, alphabet):
            res = influence_tests(tuple(int(v) for v in x), tuple(int(v) for v in y), machinery)[name]
            return res.log2 if res.log2 is not None else -math.inf

        p_value = permutation_test(stat, pair.x, pair.y, args.trials, args.seed, args.perm).p_value
    sidecar = None
    if args.exact_sidecar:
        sidecar = {
            f"ratio_{key}": res.exact
            for key, res in sorted(results.items())
            if res.exact is not None
        }
        if outcome.exact is not None:
            sidecar["ratio"] = outcome.exact
    config = {
        "command": "test", "name": name, "input": args.input, "family": args.family,
        "weights": args.weights, "trials": args.trials, "perm": args.perm, "seed": args.seed,
    }
    report = TestReport(
        statistic=name,
        value_log2=_clean_float(outcome.log2),
        terms=terms,
        p_value=p_value,
        trials=args.trials or None,
        seed=args.seed,
        family=machinery.descriptor,
        flags=tuple(flags),
        config=config,
        extra={
            "all_tests": {
                key: _clean_float(res.log2) for key, res in sorted(results.items())
            },
            "decompositions": extra_decompositions,
        },
        exact_sidecar=sidecar,
    )
    _emit(report.to_json_dict(), args.out)
    return 0


def cmd_grow(args) -> int:
    if args.input:
        source = Semimeasure.from_json_dict(_load_json(args.input))
    elif args.uniform_depth is not None:
        source = Semimeasure.uniform(args.uniform_depth)
    else:
        source = random_semimeasure(args.seed, args.random_depth, strictly_positive=True)
    trace = grow(source)
    doc = trace.to_json_dict()
    doc["config"] = {
        "command": "grow", "input": args.input, "uniform_depth": args.uniform_depth,
        "random_depth": args.random_depth, "seed": args.seed,
    }
    _emit(doc, args.out)
    return 0


def cmd_mixture(args) -> int:
    kind, params = parse_family(args.family)
    if kind == "pair":
        components = pair_family(params["k"], params["g"])
        mixture = BivariateMixture(components, params["g"], scheme=args.weights)
        doc = {
            "kind": "pair-mixture",
            "family": {"type": "pair", "order": params["k"], "grid": params["g"]},
            "weights": [format_rational(w) for w in mixture.weights],
            "components": [
                {
                    "index": idx,
                    "x_wiring": comp.x_wiring.value,
                    "y_wiring": comp.y_wiring.value,
                    "x_rows": {"".join(map(str, c)): [format_rational(m) for m in row]
                               for c, row in sorted(comp.x_table.rows.items())},
                    "y_rows": {"".join(map(str, c)): [format_rational(m) for m in row]
                               for c, row in sorted(comp.y_table.rows.items())},
                }
                for idx, comp in enumerate(components)
            ],
        }
    else:
        family = markov_family(params["k"], params["g"])
        doc = {
            "kind": "markov-mixture",
            "family": family.descriptor,
            "weights": [format_rational(w)
                        for w in build_mixture(family.tables, scheme=args.weights).weights],
            "components": [
                {
                    "index": idx,
                    "rows": {"".join(map(str, c)): [format_rational(m) for m in row]
                             for c, row in sorted(table.rows.items())},
                }
                for idx, table in enumerate(family.tables)
            ],
        }
        if args.depth:
            mm = build_mixture(family.unrolled(args.depth), scheme=args.weights)
            doc["dense"] = mm.dense().to_json_dict()
    doc["config"] = {"command": "mixture", "family": args.family,
                     "weights": args.weights, "depth": args.depth}
    _emit(doc, args.out)
    return 0


def cmd_selftest(args) -> int:
    report = run_selftest(depth=args.n, cases=args.cases, seed=args.seed)
    report["config"] = {"command": "selftest", "n": args.n, "cases": args.cases, "seed": args.seed}
    _emit(report, args.out)
    return 0 if report["ok"] else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semicausal",
        description="Exact semimeasure factorizations and influence tests for discrete timeseries",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a timeseries pair CSV")
    sim.add_argument("--model", help="model config JSON path")
    sim.add_argument("--preset", default="lag1-copy",
                     choices=["independent", "lag1-copy", "instant-copy", "hidden-shared"])
    sim.add_argument("--coupling", default="1", help="copy fidelity as a rational, e.g. 9/10")
    sim.add_argument("--n", type=int, default=1000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.set_defaults(fn=cmd_simulate)

    ana = sub.add_parser("analyze", help="fitted transfer decomposition + Granger + permutation")
    ana.add_argument("--input", required=True)
    ana.add_argument("--order", type=int, default=1)
    ana.add_argument("--alphabet", type=int, default=2)
    ana.add_argument("--trials", type=int, default=0)
    ana.add_argument("--perm", default="shuffle", choices=["shuffle", "shift"])
    ana.add_argument("--seed", type=int, default=0)
    ana.add_argument("--format", default="json", choices=["json"])
    ana.add_argument("--out")
    ana.set_defaults(fn=cmd_analyze)

    tst = sub.add_parser("test", help="run one ideal influence test against a mixture family")
    tst.add_argument("--name", required=True,
                     help="test name or equation number 7..11")
    tst.add_argument("--input", required=True)
    tst.add_argument("--family", default="pair:k=1,g=2")
    tst.add_argument("--weights", default="ilog2", choices=["dyadic", "ilog2"],
                     help="ilog2 keeps model costs logarithmic in the family index")
    tst.add_argument("--trials", type=int, default=0)
    tst.add_argument("--perm", default="shuffle", choices=["shuffle", "shift"])
    tst.add_argument("--seed", type=int, default=0)
    tst.add_argument("--exact-sidecar", action="store_true")
    tst.add_argument("--format", default="json", choices=["json"])
    tst.add_argument("--out")
    tst.set_defaults(fn=cmd_test)

    grw = sub.add_parser("grow", help="run the grow construction and emit its trace")
    grw.add_argument("--input", help="semimeasure JSON path")
    grw.add_argument("--uniform-depth", type=int)
    grw.add_argument("--random-depth", type=int, default=4)
    grw.add_argument("--seed", type=int, default=0)
    grw.add_argument("--format", default="json", choices=["json"])
    grw.add_argument("--out")
    grw.set_defaults(fn=cmd_grow)

    mix = sub.add_parser("mixture", help="materialize a model family and its mixture weights")
    mix.add_argument("--family", default="markov:k=1,g=2")
    mix.add_argument("--weights", default="dyadic", choices=["dyadic", "ilog2"])
    mix.add_argument("--depth", type=int, default=0)
    mix.add_argument("--format", default="json", choices=["json"])
    mix.add_argument("--out")
    mix.set_defaults(fn=cmd_mixture)

    slf = sub.add_parser("selftest", help="run the exact-identity suites")
    slf.add_argument("--n", type=int, default=4, help="maximum depth")
    slf.add_argument("--cases", type=int, default=50)
    slf.add_argument("--seed", type=int, default=1)
    slf.add_argument("--format", default="json", choices=["json"])
    slf.add_argument("--out")
    slf.set_defaults(fn=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SemicausalError as exc:
        error_doc = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stdout.write(dumps_report(error_doc))
        if getattr(args, "out", None):
            try:
                write_json_atomic(args.out, error_doc)
            except OSError:
                pass
        return 1


if __name__ == "__main__":
    sys.exit(main())
