"""conformance/report.py

Rapport JSON Lines du harnais de conformité.

  {"case":"<hex16>","op":"sum","a":"plain","b":"tape","max_abs_err":1.1e-16,"tol":1e-12,"status":"pass"}
  ...
  {"summary":true,"passed":N,"failed":N,"errored":N,"seed":S}

Ordre déterministe : case_id, puis paire de backends. Chaque ligne est
validée contre le schéma packagé (config/report.schema.json).
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, TextIO, Union

import jsonschema

from tensorbridge.core.errors import ReportIOError
from tensorbridge.core.logger import get_logger, log_phase

logger = get_logger(__name__)

REPORT_SCHEMA_PATH = Path(__file__).resolve().parent.parent / "config" / "report.schema.json"

PASS = "pass"
FAIL = "fail"
ERROR = "error"
FD_ORACLE = "fd-oracle"

Destination = Union[str, Path, TextIO]


@dataclass(frozen=True)
class CaseRecord:
    """
    Verdict d'une comparaison (paire de backends, ou backend contre l'oracle).

    max_abs_err vaut None quand l'écart n'est pas mesurable (formes
    différentes, erreur levée) ; il est alors écrit `null`.
    """

    case_id: str
    op: str
    backend_a: str
    backend_b: str
    max_abs_err: Optional[float]
    tol: float
    status: str
    error: Optional[str] = None

    @property
    def sort_key(self):
        return (self.case_id, self.backend_a, self.backend_b, self.op)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "case": self.case_id,
            "op": self.op,
            "a": self.backend_a,
            "b": self.backend_b,
            "max_abs_err": self.max_abs_err,
            "tol": self.tol,
            "status": self.status,
        }
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass(frozen=True)
class ReportSummary:
    passed: int
    failed: int
    errored: int
    seed: int

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.errored == 0

    def to_dict(self) -> Dict[str, Any]:
        return {"summary": True, "passed": self.passed, "failed": self.failed, "errored": self.errored, "seed": self.seed}


def summarize(records: Iterable[CaseRecord], seed: int) -> ReportSummary:
    records = list(records)
    return ReportSummary(
        passed=sum(1 for r in records if r.status == PASS),
        failed=sum(1 for r in records if r.status == FAIL),
        errored=sum(1 for r in records if r.status == ERROR),
        seed=seed,
    )


def sort_records(records: Iterable[CaseRecord]) -> List[CaseRecord]:
    return sorted(records, key=lambda r: r.sort_key)


def _load_validator() -> jsonschema.Draft7Validator:
    try:
        schema = json.loads(REPORT_SCHEMA_PATH.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportIOError(f"Schéma du rapport illisible ({REPORT_SCHEMA_PATH}) : {exc}") from exc
    return jsonschema.Draft7Validator(schema)


def _dump(obj: Dict[str, Any]) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def render_report(records: Iterable[CaseRecord], seed: int) -> str:
    """Texte complet du rapport (lignes validées), terminé par la ligne de synthèse."""
    validator = _load_validator()
    ordered = sort_records(records)
    lines = []
    for obj in [r.to_dict() for r in ordered] + [summarize(ordered, seed).to_dict()]:
        errors = list(validator.iter_errors(obj))
        if errors:
            raise ReportIOError(f"Ligne de rapport invalide {obj} : {errors[0].message}")
        lines.append(_dump(obj))
    return "\n".join(lines) + "\n"


def emit_report(records: Iterable[CaseRecord], destination: Destination, seed: int) -> ReportSummary:
    """
    Écrit le rapport vers un chemin, "-" (stdout) ou un flux texte ouvert.

    Lève ReportIOError si la destination n'est pas inscriptible.
    """
    records = list(records)
    text = render_report(records, seed)
    summary = summarize(records, seed)
    log_phase(logger, "report.emit", f"{len(records)} enregistrement(s) vers {destination}")

    if hasattr(destination, "write"):
        try:
            destination.write(text)
            destination.flush()
        except (OSError, ValueError) as exc:
            raise ReportIOError(f"Écriture du rapport impossible : {exc}") from exc
        return summary

    if str(destination) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return summary

    path = Path(destination)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"Écriture du rapport impossible ({path}) : {exc}") from exc
    return summary


def read_report(path: Union[str, Path]) -> List[Dict[str, Any]]:
    """Relit et valide un rapport ; lève ReportIOError sur la première ligne invalide."""
    validator = _load_validator()
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ReportIOError(f"Lecture du rapport impossible ({path}) : {exc}") from exc

    objects = []
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ReportIOError(f"{path}:{n} : JSON invalide : {exc}") from exc
        errors = list(validator.iter_errors(obj))
        if errors:
            raise ReportIOError(f"{path}:{n} : {errors[0].message}")
        objects.append(obj)
    return objects
