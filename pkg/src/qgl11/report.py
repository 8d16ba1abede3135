"""Machine-readable check reports and suite summaries.

A CheckReport carries one check's verdict plus enough context to rerun
it: the check id, the (case, framework) pair it ran against, its status,
labelled residuals, the wall time, and the effective parameters.  The
JSON form round-trips losslessly; rerunning with the same seed
reproduces every field except the timings.
"""
from __future__ import annotations

import json

SCHEMA_VERSION = 1

STATUSES = ("PASS", "FAIL", "OBSTRUCTION-CONFIRMED", "POLE")

# residual lists are stored in full up to this bound; beyond it only the
# count survives (residual_total keeps the true number)
MAX_RESIDUALS = 64


def _residual_str(value):
    to_str = getattr(value, "to_str", None)
    if to_str is not None:
        return to_str()
    return str(value)


def as_residual_pairs(residuals, limit=MAX_RESIDUALS):
    """Normalize residuals to [(context, serialized value)] with a cap."""
    out = []
    for item in residuals[:limit]:
        ctx, value = item
        out.append((str(ctx), _residual_str(value)))
    return out


class CheckReport:
    """One check's outcome."""

    __slots__ = ("check", "case", "framework", "status", "residuals",
                 "seconds", "params", "residual_total")

    def __init__(self, check, case, framework, status, residuals, seconds,
                 params, residual_total=None):
        if status not in STATUSES:
            raise ValueError(f"unknown status {status!r}")
        residuals = [(str(c), str(v)) for c, v in residuals]
        if status == "FAIL" and not residuals:
            raise ValueError("FAIL reports must carry residuals")
        self.check = check
        self.case = case
        self.framework = framework
        self.status = status
        self.residuals = residuals
        self.seconds = float(seconds)
        self.params = dict(params)
        self.residual_total = (len(residuals) if residual_total is None
                               else int(residual_total))

    @property
    def ok(self):
        return self.status in ("PASS", "OBSTRUCTION-CONFIRMED")

    def to_dict(self):
        return {
            "check": self.check,
            "case": self.case,
            "framework": self.framework,
            "status": self.status,
            "residuals": [[c, v] for c, v in self.residuals],
            "residual_total": self.residual_total,
            "seconds": self.seconds,
            "params": dict(self.params),
        }

    @staticmethod
    def from_dict(data):
        return CheckReport(
            check=data["check"],
            case=data["case"],
            framework=data["framework"],
            status=data["status"],
            residuals=[(c, v) for c, v in data["residuals"]],
            seconds=data["seconds"],
            params=data["params"],
            residual_total=data["residual_total"],
        )

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_json(text):
        return CheckReport.from_dict(json.loads(text))

    def __repr__(self):
        return (f"CheckReport({self.check!r}, {self.case}/{self.framework}, "
                f"{self.status}, {self.residual_total} residuals)")


def build_suite_report(config, reports):
    """Aggregate dict for a full run: versioned schema, echoed config,
    per-check reports, and a status tally."""
    tally = {}
    for rep in reports:
        tally[rep.status] = tally.get(rep.status, 0) + 1
    return {
        "schema_version": SCHEMA_VERSION,
        "config": dict(config),
        "summary": {
            "total": len(reports),
            "by_status": {k: tally[k] for k in sorted(tally)},
            "ok": all(rep.ok for rep in reports),
        },
        "reports": [rep.to_dict() for rep in reports],
    }


def suite_to_json(suite_dict):
    return json.dumps(suite_dict, sort_keys=True, indent=2) + "\n"


def suite_from_json(text):
    data = json.loads(text)
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"unsupported report schema {data.get('schema_version')!r}")
    reports = [CheckReport.from_dict(d) for d in data["reports"]]
    return data["config"], reports
