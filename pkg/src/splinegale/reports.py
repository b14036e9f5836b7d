"""Check reports and their CSV / JSON serialization.

A report row records the check name, the instance fingerprint and the
two sides of the inequality it measured.  `passed` is True/False only
for checks carrying a hard bound; empirical-constant sweeps leave it
None (serialized as an empty CSV cell and JSON null).
"""

import csv
import json
from dataclasses import dataclass, field

CSV_COLUMNS = ("check", "seed", "k", "kprime", "gamma", "level_count",
               "lhs", "rhs", "ratio", "pass", "wall_ms")


@dataclass
class CheckReport:
    check: str
    seed: int
    k: int
    kprime: int
    gamma: float
    level_count: int
    lhs: float
    rhs: float
    ratio: float
    passed: bool | None
    wall_ms: float = 0.0
    axis: str | None = None
    axis_value: float | None = None
    extra: dict = field(default_factory=dict)

    def to_row(self, with_axis: bool = False) -> list:
        row = [
            self.check, self.seed, self.k, self.kprime,
            _fmt(self.gamma), self.level_count,
            _fmt(self.lhs), _fmt(self.rhs), _fmt(self.ratio),
            "" if self.passed is None else str(bool(self.passed)).lower(),
            _fmt(self.wall_ms),
        ]
        if with_axis:
            row += [self.axis or "", _fmt_opt(self.axis_value)]
        return row

    def to_dict(self) -> dict:
        out = {
            "check": self.check, "seed": self.seed, "k": self.k,
            "kprime": self.kprime, "gamma": self.gamma,
            "level_count": self.level_count, "lhs": self.lhs,
            "rhs": self.rhs, "ratio": self.ratio, "pass": self.passed,
            "wall_ms": self.wall_ms,
        }
        if self.axis is not None:
            out["axis"] = self.axis
            out["axis_value"] = self.axis_value
        if self.extra:
            out["extra"] = self.extra
        return out


def _fmt(x) -> str:
    return repr(float(x))


def _fmt_opt(x) -> str:
    return "" if x is None else repr(float(x))


def write_csv(path, reports, with_axis: bool = False):
    cols = CSV_COLUMNS + (("axis", "axis_value") if with_axis else ())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for rep in reports:
            writer.writerow(rep.to_row(with_axis))


def summarize(reports) -> dict:
    by_check: dict = {}
    for rep in reports:
        entry = by_check.setdefault(
            rep.check,
            {"trials": 0, "failed": 0, "max_ratio": None, "median_ratio": None,
             "_ratios": []},
        )
        entry["trials"] += 1
        if rep.passed is False:
            entry["failed"] += 1
        if rep.ratio == rep.ratio:  # skip NaN
            entry["_ratios"].append(rep.ratio)
    for entry in by_check.values():
        ratios = sorted(entry.pop("_ratios"))
        if ratios:
            entry["max_ratio"] = ratios[-1]
            entry["median_ratio"] = ratios[len(ratios) // 2]
    return by_check


def write_json(path, config_dict: dict, reports, seed_scheme: str):
    payload = {
        "schema": config_dict.get("schema", 1),
        "config": config_dict,
        "seed_scheme": seed_scheme,
        "summary": summarize(reports),
        "reports": [rep.to_dict() for rep in reports],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return payload


def hard_failures(reports) -> int:
    return sum(1 for rep in reports if rep.passed is False)
