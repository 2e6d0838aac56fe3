"""Report structures and deterministic JSON emission.

Reports are byte-identical across runs with identical inputs and seeds:
keys are sorted, floats go through repr, and no timestamps or environment
data are embedded. Every report carries the fully resolved run config.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .semimeasure import format_rational


@dataclass(frozen=True)
class TestReport:
    statistic: str
    value_log2: float | None
    terms: Mapping[str, float] | None
    p_value: float | None
    trials: int | None
    seed: int
    family: Mapping | None
    flags: tuple[str, ...] = ()
    config: Mapping | None = None
    extra: Mapping = field(default_factory=dict)
    exact_sidecar: Mapping[str, Fraction] | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "statistic": self.statistic,
            "value_log2": self.value_log2,
            "terms": dict(self.terms) if self.terms is not None else None,
            "p_value": self.p_value,
            "trials": self.trials,
            "seed": self.seed,
            "family": dict(self.family) if self.family is not None else None,
            "flags": list(self.flags),
        }
        if self.config is not None:
            doc["config"] = dict(self.config)
        doc.update(self.extra)
        if self.exact_sidecar is not None:
            doc["exact"] = {k: format_rational(v) for k, v in self.exact_sidecar.items()}
        return doc


def dumps_report(doc: Mapping) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json_atomic(path, doc: Mapping) -> None:
    """Write the document to a temp file and rename it into place."""
    text = dumps_report(doc)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
