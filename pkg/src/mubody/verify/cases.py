"""Case records, verdict rules and report serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

VERDICTS = ("pass", "equality", "fail", "exploratory", "skipped")
EQUALITY_FACTOR = 10.0
STRICT_FACTOR = 100.0


class HypothesisError(ValueError):
    """A named hypothesis of the statement does not hold for the inputs."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        super().__init__(f"hypothesis {hypothesis!r} violated" + (f": {detail}" if detail else ""))


class SkipCase(Exception):
    """Raised by a check when the case cannot be instantiated (e.g. containment fails)."""


def oriented_slack(lhs: float, rhs: float) -> float:
    """``(rhs - lhs) / max(|lhs|, |rhs|)``; nonnegative means the inequality holds."""
    scale = max(abs(lhs), abs(rhs))
    if scale == 0:
        return 0.0
    return (rhs - lhs) / scale


def classify(slack: float, budget: float, gated: bool) -> tuple[str, bool]:
    """Verdict and strictness flag for a scalar slack."""
    if not math.isfinite(slack):
        verdict = "fail"
    elif slack < -budget:
        verdict = "fail"
    elif abs(slack) <= EQUALITY_FACTOR * budget:
        verdict = "equality"
    else:
        verdict = "pass"
    strict = verdict == "pass" and slack > STRICT_FACTOR * budget
    if not gated:
        return "exploratory", strict
    return verdict, strict


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


@dataclass
class PropertyCase:
    case_id: str
    statement: str
    kind: str                       # "inequality" or "identity"
    inputs: dict
    flags_required: tuple[str, ...]
    flags_present: tuple[str, ...]
    lhs: float = math.nan
    rhs: float = math.nan
    slack: float = math.nan
    budget: float = math.nan
    verdict: str = "skipped"
    strict: bool = False
    # verdict the numbers would get if the case were gated
    raw_verdict: str = ""
    refinement: dict = field(default_factory=dict)
    note: str = ""

    @property
    def gated(self) -> bool:
        return set(self.flags_required) <= set(self.flags_present)

    @property
    def missing_flags(self) -> tuple[str, ...]:
        return tuple(f for f in self.flags_required if f not in self.flags_present)

    def to_json(self) -> dict:
        return _clean({"id": self.case_id, "statement": self.statement, "kind": self.kind,
                       "inputs": self.inputs, "flags_required": list(self.flags_required),
                       "flags_present": list(self.flags_present), "lhs": self.lhs, "rhs": self.rhs,
                       "slack": self.slack, "budget": self.budget, "verdict": self.verdict,
                       "strict": self.strict, "raw_verdict": self.raw_verdict,
                       "refinement": self.refinement, "note": self.note})


CSV_FIELDS = ("id", "statement", "kind", "verdict", "raw_verdict", "strict", "lhs", "rhs",
              "slack", "budget", "missing_flags", "inputs", "note")


@dataclass
class VerificationReport:
    suite: str
    seed: int
    grid: dict
    cases: list[PropertyCase]
    wall_time: float = 0.0
    config: dict = field(default_factory=dict)

    @property
    def counts(self) -> dict:
        out = {v: 0 for v in VERDICTS}
        for c in self.cases:
            out[c.verdict] += 1
        out["total"] = len(self.cases)
        out["strict"] = sum(1 for c in self.cases if c.strict)
        return out

    @property
    def failures(self) -> list[PropertyCase]:
        return [c for c in self.cases if c.verdict == "fail"]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self, timing: bool = True) -> dict:
        out = {"suite": self.suite, "seed": self.seed, "grid": self.grid, "config": self.config,
               "counts": self.counts, "cases": [c.to_json() for c in self.cases]}
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def dumps(self, timing: bool = True) -> str:
        return json.dumps(self.to_json(timing), sort_keys=True, indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for c in self.cases:
            w.writerow([c.case_id, c.statement, c.kind, c.verdict, c.raw_verdict, int(c.strict),
                        repr(c.lhs), repr(c.rhs), repr(c.slack), repr(c.budget),
                        ";".join(c.missing_flags), json.dumps(_clean(c.inputs), sort_keys=True),
                        c.note])
        return buf.getvalue()

    def to_markdown(self) -> str:
        counts = self.counts
        lines = [f"# Verification report: {self.suite}", "",
                 f"seed {self.seed}, grid {json.dumps(self.grid, sort_keys=True)}", "",
                 "| verdict | count |", "|---|---|"]
        lines += [f"| {k} | {counts[k]} |" for k in VERDICTS + ("strict", "total")]
        by_stmt: dict[str, dict] = {}
        for c in self.cases:
            row = by_stmt.setdefault(c.statement, {v: 0 for v in VERDICTS})
            row[c.verdict] += 1
        lines += ["", "| statement | " + " | ".join(VERDICTS) + " | min slack |",
                  "|---" * (len(VERDICTS) + 2) + "|"]
        for stmt in sorted(by_stmt):
            sl = [c.slack for c in self.cases if c.statement == stmt and math.isfinite(c.slack)
                  and c.verdict != "skipped"]
            lo = f"{min(sl):.3g}" if sl else "-"
            lines.append(f"| {stmt} | " + " | ".join(str(by_stmt[stmt][v]) for v in VERDICTS)
                         + f" | {lo} |")
        if self.failures:
            lines += ["", "## Failures", ""]
            lines += [f"- {c.case_id}: slack {c.slack:.3g} < -budget {c.budget:.3g} ({c.note})"
                      for c in self.failures]
        return "\n".join(lines) + "\n"


def report_from_json(data: dict) -> VerificationReport:
    cases = []
    for d in data["cases"]:
        num = {k: (math.nan if d[k] is None else d[k]) for k in ("lhs", "rhs", "slack", "budget")}
        cases.append(PropertyCase(d["id"], d["statement"], d["kind"], d["inputs"],
                                  tuple(d["flags_required"]), tuple(d["flags_present"]),
                                  verdict=d["verdict"], strict=d["strict"],
                                  raw_verdict=d.get("raw_verdict", ""),
                                  refinement=d.get("refinement", {}), note=d.get("note", ""), **num))
    return VerificationReport(data["suite"], data["seed"], data["grid"], cases,
                              data.get("wall_time", 0.0), data.get("config", {}))
