"""Certification reports: a JSON document with a stable schema, and a Markdown view.

All reals are stored as decimal strings with 17 significant digits, so a
report parses back to the same values and re-emits byte for byte.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .interval import Interval

__all__ = [
    "SCHEMA_VERSION",
    "EXIT_CODES",
    "Certificate",
    "Report",
    "plain",
    "fmt_real",
    "overall_verdict",
]

SCHEMA_VERSION = 1

EXIT_CODES = {"CERTIFIED": 0, "FALSIFIED": 1, "INCONCLUSIVE": 2}
IO_ERROR_EXIT = 3

_OK = {"PASS", "CERTIFIED"}
_BAD = {"FAIL", "FALSIFIED", "ERROR"}


def fmt_real(x: float) -> str:
    """17 significant digits, trailing zeros kept; ``inf``/``-inf``/``nan`` spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, "#.17g")


def plain(obj: Any) -> Any:
    """Convert results into JSON-ready values (reals become strings)."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_real(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Interval):
        return {"lo": fmt_real(obj.lo), "hi": fmt_real(obj.hi)}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class Certificate:
    name: str
    verdict: str
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "data": plain(self.data)}


def overall_verdict(verdicts) -> str:
    """CERTIFIED only if every verdict is PASS or CERTIFIED.

    Any FAIL, FALSIFIED or ERROR makes the whole FALSIFIED; otherwise any
    INCONCLUSIVE makes it INCONCLUSIVE.
    """
    verdicts = list(verdicts)
    if not verdicts:
        return "INCONCLUSIVE"
    if any(v in _BAD for v in verdicts):
        return "FALSIFIED"
    if all(v in _OK for v in verdicts):
        return "CERTIFIED"
    return "INCONCLUSIVE"


@dataclass
class Report:
    command: str
    configuration: dict
    certificates: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)

    def add(self, name: str, verdict: str, data=None) -> Certificate:
        cert = Certificate(name, verdict, {} if data is None else data)
        self.certificates.append(cert)
        return cert

    @property
    def overall(self) -> str:
        return overall_verdict(c.verdict for c in self.certificates)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.overall]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "overall": self.overall,
            "configuration": plain(self.configuration),
            "certificates": [c.to_dict() for c in self.certificates],
            "environment": plain(self.environment),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {d.get('schema_version')!r}")
        rep = cls(d["command"], d["configuration"], [], d["environment"])
        for c in d["certificates"]:
            rep.certificates.append(Certificate(c["name"], c["verdict"], c["data"]))
        if rep.overall != d["overall"]:
            raise ValueError("stored overall verdict disagrees with the certificates")
        return rep

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_markdown(self) -> str:
        d = self.to_dict()
        out = [f"# Certification report: `{self.command}`", "", f"**Overall: {d['overall']}**", ""]
        out += ["## Configuration", "", "| key | value |", "|---|---|"]
        out += [f"| {k} | {_md_value(v)} |" for k, v in d["configuration"].items()]
        out += ["", "## Certificates", "", "| certificate | verdict |", "|---|---|"]
        out += [f"| {c['name']} | {c['verdict']} |" for c in d["certificates"]]
        for c in d["certificates"]:
            out += ["", f"### {c['name']}: {c['verdict']}", ""]
            rows = list(_flatten(c["data"]))
            if rows:
                out += ["| field | value |", "|---|---|"]
                out += [f"| {k} | {_md_value(v)} |" for k, v in rows]
        out += ["", "## Environment", "", "| key | value |", "|---|---|"]
        out += [f"| {k} | {_md_value(v)} |" for k, v in d["environment"].items()]
        return "\n".join(out) + "\n"


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict) and not set(v) <= {"lo", "hi"}:
            yield from _flatten(v, key + ".")
        else:
            yield key, v


def _md_value(v) -> str:
    if isinstance(v, dict) and set(v) == {"lo", "hi"}:
        return f"[{v['lo']}, {v['hi']}]"
    if isinstance(v, list):
        return "(" + ", ".join(_md_value(x) for x in v) + ")"
    if isinstance(v, dict):
        return ", ".join(f"{k}={_md_value(x)}" for k, x in v.items())
    if v is None:
        return "-"
    return str(v).replace("|", "\\|")
