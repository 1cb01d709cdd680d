"""Verdict records shared by all checkers."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from ._order import csorted


class Refusal(Exception):
    """A computation declined because no exact method applies."""

    def __init__(self, reason, estimate=None):
        super().__init__(reason)
        self.reason = reason
        self.estimate = estimate


class SizeGuardExceeded(Refusal):
    pass


def term(x):
    """Printable, JSON-friendly rendering of an element term."""
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, (tuple, list)):
        return [term(e) for e in x]
    if isinstance(x, (set, frozenset)):
        return [term(e) for e in csorted(x)]
    if isinstance(x, dict):
        return [[term(k), term(v)] for k, v in sorted(x.items(), key=lambda kv: repr(kv[0]))]
    to_json = getattr(x, "to_json", None)
    if to_json is not None:
        return to_json()
    return str(x)


@dataclass
class CheckReport:
    name: str
    verdict: bool
    witnesses: list = field(default_factory=list)
    counterexample: object = None
    caveats: list = field(default_factory=list)

    def __post_init__(self):
        if not self.verdict and self.counterexample is None:
            raise ValueError(f"{self.name}: a false verdict needs a counterexample")

    def __bool__(self):
        return self.verdict

    def to_json(self):
        return {
            "name": self.name,
            "verdict": self.verdict,
            "witnesses": term(self.witnesses),
            "counterexample": term(self.counterexample),
            "caveats": list(self.caveats),
        }


@dataclass
class DKReport:
    essential_surjectivity: CheckReport
    mapping: dict = field(default_factory=dict)
    base: CheckReport | None = None
    caveats: list = field(default_factory=list)

    @property
    def verdict(self):
        if self.base is not None:
            return self.base.verdict
        return self.essential_surjectivity.verdict and all(r.verdict for r in self.mapping.values())

    def __bool__(self):
        return self.verdict

    def first_failure(self):
        if self.base is not None:
            return None if self.base.verdict else ("base", self.base.counterexample)
        if not self.essential_surjectivity.verdict:
            return ("essential_surjectivity", self.essential_surjectivity.counterexample)
        for pair, rep in self.mapping.items():
            if not rep.verdict:
                return ("mapping", pair, rep.first_failure())
        return None

    def to_json(self):
        out = {"verdict": self.verdict}
        if self.base is not None:
            out["base"] = self.base.to_json()
        else:
            out["essential_surjectivity"] = self.essential_surjectivity.to_json()
            out["mapping"] = [[term(k), v.to_json()] for k, v in
                              sorted(self.mapping.items(), key=lambda kv: repr(kv[0]))]
        out["caveats"] = list(self.caveats)
        return out


def dumps(obj):
    payload = {"schema": 1}
    payload.update(obj.to_json() if hasattr(obj, "to_json") else {"value": term(obj)})
    return json.dumps(payload, indent=2)
