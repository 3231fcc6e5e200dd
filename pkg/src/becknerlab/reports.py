"""Machine-readable verification outcomes and their JSON / CSV forms."""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

__all__ = ["CheckReport", "InequalityReport", "CSV_COLUMNS", "to_json", "from_json", "to_csv", "merge"]

CSV_COLUMNS = ("name", "lhs", "rhs", "deficit", "tolerance_or_se", "pass")


@dataclass
class CheckReport:
    """Outcome of one verification.

    ``kind`` is ``"inequality"`` (pass iff ``deficit >= -tolerance``),
    ``"identity"`` (pass iff ``|lhs - rhs| <= tolerance``) or ``"mc"``
    (pass iff ``|lhs - rhs| <= 3 (se + allowance)``; ``tolerance`` then
    holds that product). ``deficit`` is always ``rhs - lhs``.
    """

    name: str
    lhs: float
    rhs: float
    tolerance: float
    kind: str = "inequality"
    se: float = 0.0
    allowance: float = 0.0
    inputs: dict = field(default_factory=dict)
    deficit: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        self.tolerance = float(self.tolerance)
        self.se = float(self.se)
        self.allowance = float(self.allowance)
        self.deficit = self.rhs - self.lhs
        finite = math.isfinite(self.lhs) and math.isfinite(self.rhs)
        if self.kind == "inequality":
            ok = self.deficit >= -self.tolerance
        elif self.kind in ("identity", "mc"):
            ok = abs(self.deficit) <= self.tolerance
        else:
            raise ValueError(f"unknown report kind {self.kind!r}")
        self.passed = bool(finite and ok)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d.pop("deficit", None)
        d.pop("passed", None)
        return cls(**d)


InequalityReport = CheckReport


def mc_report(name, lhs, rhs, se, allowance, inputs=None):
    """Two-sided Monte Carlo comparison, judged at ``3 (se + allowance)``."""
    return CheckReport(
        name, lhs, rhs, 3.0 * (se + allowance), kind="mc", se=se, allowance=allowance, inputs=inputs or {}
    )


def to_json(reports, **meta):
    doc = {"meta": meta, "reports": [r.to_dict() for r in reports]}
    return json.dumps(doc, indent=2, sort_keys=True, default=_jsonable)


def from_json(text):
    doc = json.loads(text)
    return [CheckReport.from_dict(d) for d in doc["reports"]]


def to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([r.name, repr(r.lhs), repr(r.rhs), repr(r.deficit), repr(r.tolerance), int(r.passed)])
    return buf.getvalue()


def merge(*docs):
    """Concatenate the report lists of several JSON documents."""
    out = []
    for text in docs:
        out.extend(from_json(text))
    return out


def _jsonable(obj):
    try:
        import numpy as np

        if isinstance(obj, np.generic):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
    except ImportError:  # pragma: no cover
        pass
    raise TypeError(f"not JSON serializable: {type(obj)!r}")
