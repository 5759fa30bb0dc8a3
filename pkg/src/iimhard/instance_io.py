"""Instance files: YAML (or JSON) mappings naming the scenario to solve.

::

    initial_failures: [a2, a3]
    budget: 1          # ENH
    protect: [b4]      # TEH
    hardened: []       # plan to apply when simulating
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import yaml

KNOWN_KEYS = {"initial_failures", "budget", "protect", "hardened"}


class InstanceFormatError(ValueError):
    pass


@dataclass
class InstanceSpec:
    initial_failures: list[str] = field(default_factory=list)
    budget: Optional[int] = None
    protect: Optional[list[str]] = None
    hardened: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"initial_failures": list(self.initial_failures)}
        if self.budget is not None:
            out["budget"] = self.budget
        if self.protect is not None:
            out["protect"] = list(self.protect)
        if self.hardened:
            out["hardened"] = list(self.hardened)
        return out


def _labels(data, key):
    val = data.get(key)
    if val is None:
        return None
    if isinstance(val, str):
        val = [v for v in val.replace(",", " ").split() if v]
    if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
        raise InstanceFormatError(f"{key} must be a list of labels")
    return val


def parse_instance(text: str) -> InstanceSpec:
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise InstanceFormatError("instance must be a mapping")
    unknown = set(data) - KNOWN_KEYS
    if unknown:
        raise InstanceFormatError(f"unknown instance fields: {sorted(unknown)}")
    budget = data.get("budget")
    if budget is not None and (not isinstance(budget, int) or budget < 0):
        raise InstanceFormatError("budget must be a non-negative integer")
    return InstanceSpec(
        initial_failures=_labels(data, "initial_failures") or [],
        budget=budget,
        protect=_labels(data, "protect"),
        hardened=_labels(data, "hardened") or [],
    )


def load_instance(path) -> InstanceSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())
