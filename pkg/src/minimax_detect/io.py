"""Reading and writing score files, group configs, channels and reports.

Score files come in two layouts that carry the same fields:

``csv_wide``
    ``sample_id,role,algorithm,loss,norm,epsilon,fooled,det_0,...,det_{K-1}``
    with empty strings for absent optional fields.
``jsonl``
    one JSON object per line using the same field names.

Lines starting with ``#`` are comments in both layouts; the synthetic
generator uses one to record its seed and PRNG.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (LOSS_NAMES, AttackKey, EmptyCell, ParseError,
                   Role, ScoreRecord, ValidationError, expand_group, validate_channel)

FORMATS = ("csv_wide", "jsonl")
BASE_COLUMNS = ("sample_id", "role", "algorithm", "loss", "norm", "epsilon", "fooled")
PRNG_NAME = "numpy.random.Generator(PCG64)"
_DATA = os.path.join(os.path.dirname(__file__), "data")


def default_groups_path():
    return os.path.join(_DATA, "table1.json")


def default_synthetic_path():
    return os.path.join(_DATA, "synthetic_default.json")


def guess_format(path) -> str:
    return "jsonl" if str(path).endswith((".jsonl", ".ndjson")) else "csv_wide"


# -- score records -----------------------------------------------------------

def _parse_bool(text, line):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes"):
        return True
    if t in ("", "0", "false", "no"):
        return False
    raise ParseError(f"cannot read {text!r} as a boolean", line)


def _parse_epsilon(text, line):
    if text is None or text == "":
        return None
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ParseError(f"epsilon {text!r} is not a number", line) from None


def _record_from_fields(row: dict, det_keys, line) -> ScoreRecord:
    def opt(name):
        v = row.get(name)
        return None if v is None or v == "" else v

    try:
        scores = [float(row[k]) for k in det_keys]
    except (TypeError, ValueError, KeyError) as exc:
        raise ParseError(f"bad detector score: {exc}", line) from None
    role = opt("role")
    try:
        attack = None
        if role == Role.ADVERSARIAL.value:
            if opt("algorithm") is None:
                raise ValidationError("adversarial record has an empty algorithm")
            attack = AttackKey(opt("algorithm"), opt("loss"), opt("norm") or "none",
                               _parse_epsilon(opt("epsilon"), line))
        elif any(opt(f) is not None for f in ("algorithm", "loss", "norm", "epsilon")):
            raise ValidationError("natural record carries attack fields")
        return ScoreRecord(str(row.get("sample_id") or ""), role, scores, attack,
                           _parse_bool(row.get("fooled", ""), line))
    except ValidationError as exc:
        raise ValidationError(f"line {line}: {exc}") from None


def _uncommented(lines):
    for n, text in enumerate(lines, start=1):
        if text.strip() and not text.lstrip().startswith("#"):
            yield n, text


def parse_scores(text: str, format: str = "csv_wide") -> list:
    if format not in FORMATS:
        raise ParseError(f"unknown score format {format!r}; expected one of {FORMATS}")
    lines = text.splitlines()
    records = []
    if format == "csv_wide":
        body = list(_uncommented(lines))
        if not body:
            raise ParseError("score file has no header")
        header = next(csv.reader([body[0][1]]))
        if tuple(header[: len(BASE_COLUMNS)]) != BASE_COLUMNS:
            raise ParseError(f"header must start with {','.join(BASE_COLUMNS)}", body[0][0])
        det_keys = header[len(BASE_COLUMNS):]
        if not det_keys or det_keys != [f"det_{i}" for i in range(len(det_keys))]:
            raise ParseError("detector columns must be det_0 ... det_{K-1}", body[0][0])
        for n, text_line in body[1:]:
            cells = next(csv.reader([text_line]))
            if len(cells) != len(header):
                raise ParseError(f"expected {len(header)} columns, got {len(cells)}", n)
            records.append(_record_from_fields(dict(zip(header, cells)), det_keys, n))
    else:
        for n, text_line in _uncommented(lines):
            try:
                obj = json.loads(text_line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", n) from None
            if not isinstance(obj, dict):
                raise ParseError("each line must be a JSON object", n)
            det_keys = sorted((k for k in obj if k.startswith("det_")), key=lambda k: int(k[4:]))
            if not det_keys or det_keys != [f"det_{i}" for i in range(len(det_keys))]:
                raise ParseError("detector fields must be det_0 ... det_{K-1}", n)
            if isinstance(obj.get("epsilon"), (int, float)):
                obj["epsilon"] = repr(float(obj["epsilon"]))
            records.append(_record_from_fields(obj, det_keys, n))
    return records


def read_scores(path, format: Optional[str] = None) -> list:
    """Load and validate score records; ``format`` defaults from the file extension."""
    format = format or guess_format(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read score file: {exc.strerror}", path=path) from None
    try:
        return parse_scores(text, format)
    except ParseError as exc:
        raise ParseError(exc.reason, exc.line, path) from None


def _fmt_float(x) -> str:
    return repr(float(x))


def _record_fields(rec: ScoreRecord) -> dict:
    a = rec.attack
    return {
        "sample_id": rec.sample_id,
        "role": rec.role.value,
        "algorithm": a.algorithm if a else None,
        "loss": a.loss if a else None,
        "norm": a.norm if a else None,
        "epsilon": a.epsilon if a else None,
        "fooled": rec.fooled,
    }


def format_scores(records: Sequence[ScoreRecord], format: str = "csv_wide",
                  header: Sequence[str] = ()) -> str:
    """Serialise records; ``header`` lines are written as ``#`` comments first."""
    if format not in FORMATS:
        raise ParseError(f"unknown score format {format!r}; expected one of {FORMATS}")
    records = list(records)
    ks = {r.K for r in records}
    if len(ks) > 1:
        raise ValidationError(f"records disagree on the number of detectors: {sorted(ks)}")
    k = ks.pop() if ks else 0
    out = _stdio.StringIO()
    for h in header:
        out.write(f"# {h}\n")
    det_keys = [f"det_{i}" for i in range(k)]
    if format == "csv_wide":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(list(BASE_COLUMNS) + det_keys)
        for r in records:
            f = _record_fields(r)
            w.writerow([
                f["sample_id"], f["role"], f["algorithm"] or "", f["loss"] or "", f["norm"] or "",
                "" if f["epsilon"] is None else _fmt_float(f["epsilon"]),
                "true" if f["fooled"] else "false",
            ] + [_fmt_float(s) for s in r.scores])
    else:
        for r in records:
            f = _record_fields(r)
            f.update(zip(det_keys, r.scores))
            out.write(json.dumps(f) + "\n")
    return out.getvalue()


def write_scores(path, records, format: Optional[str] = None, header: Sequence[str] = ()):
    format = format or guess_format(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_scores(records, format, header))


# -- group config ------------------------------------------------------------

def parse_groups(doc, source=None) -> list:
    """Expand a group config (``{"cells": [...]}`` or a bare list of cells)."""
    cells = doc.get("cells") if isinstance(doc, dict) else doc
    if not isinstance(cells, list) or not cells:
        raise ParseError("group config must list at least one cell", path=source)
    groups = []
    for i, cell in enumerate(cells):
        if not isinstance(cell, dict) or "norm" not in cell or "algorithms" not in cell:
            raise ParseError(f"cell {i} needs 'norm' and 'algorithms'", path=source)
        algs = cell["algorithms"]
        if isinstance(algs, str):
            algs = [a for a in algs.split("+") if a.strip()]
        if not algs:
            raise EmptyCell(f"cell {i} ({cell['norm']}, {cell.get('epsilon')}) lists no algorithms")
        try:
            groups.append(expand_group(algs, cell["norm"], cell.get("epsilon")))
        except (TypeError, ValidationError) as exc:
            raise ParseError(f"cell {i}: {exc}", path=source) from None
    keys = [g.key for g in groups]
    if len(set(keys)) != len(keys):
        raise ParseError("two cells share the same (norm, epsilon)", path=source)
    return groups


def read_groups(path=None) -> list:
    """Load a group config; ``None`` loads the shipped simultaneous-attack table."""
    src = default_groups_path() if path is None else path
    try:
        with open(src, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read group config: {exc.strerror}", path=path) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, path) from None
    return parse_groups(doc, path)


def group_census(groups) -> dict:
    return {
        "n_cells": len(groups),
        "n_variants": sum(len(g) for g in groups),
        "cells": [{"norm": g.norm, "epsilon": g.epsilon, "n_members": len(g),
                   "members": [str(m) for m in g.sorted_members()]} for g in groups],
    }


# -- channels ----------------------------------------------------------------

def parse_rows(text: str):
    """Inline channel syntax ``"a,b;c,d"``, one ``;``-separated row per detector."""
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.strip().split(";") if row.strip()]
    except ValueError as exc:
        raise ParseError(f"malformed channel rows {text!r}: {exc}") from None
    if not rows:
        raise ParseError("channel has no rows")
    if any(len(r) != 2 for r in rows):
        raise ParseError(f"every channel row needs exactly 2 entries: {text!r}")
    return validate_channel(rows)


def read_channel(path):
    """Channel from JSON (``[[a, b], ...]`` or ``{"rows": ...}``) or ``a,b`` lines."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read channel file: {exc.strerror}", path=path) from None
    stripped = text.strip()
    if stripped.startswith(("[", "{")):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, path) from None
        rows = doc.get("rows") if isinstance(doc, dict) else doc
        return validate_channel(rows)
    return parse_rows(";".join(line for _, line in _uncommented(text.splitlines())))


def channel_to_json(channel) -> str:
    return json.dumps({"rows": validate_channel(channel).to_list()})


def channel_from_json(text: str):
    doc = json.loads(text)
    return validate_channel(doc["rows"] if isinstance(doc, dict) else doc)


# -- synthetic scenarios -----------------------------------------------------

@dataclass(frozen=True)
class DetectorProfile:
    """Beta parameters for one detector's scores on attacked inputs."""

    specialty: Optional[str]
    on: tuple = (8.0, 2.0)
    off: tuple = (2.0, 8.0)
    name: str = ""

    def __post_init__(self):
        if self.specialty is not None and self.specialty not in LOSS_NAMES:
            raise ValidationError(f"unknown specialty loss {self.specialty!r}")
        for ab in (self.on, self.off):
            if len(ab) != 2 or min(ab) <= 0:
                raise ValidationError(f"Beta parameters must be two positive reals, got {ab!r}")
        object.__setattr__(self, "on", tuple(float(x) for x in self.on))
        object.__setattr__(self, "off", tuple(float(x) for x in self.off))


@dataclass(frozen=True)
class SyntheticConfig:
    seed: int = 0
    n_natural: int = 500
    n_adversarial_per_attack: int = 500
    detector_profiles: tuple = tuple(DetectorProfile(loss, name=loss) for loss in LOSS_NAMES)
    natural_profile: tuple = (2.0, 8.0)
    fool_rate: float = 0.9
    cells: tuple = ({"norm": "Linf", "epsilon": 0.125,
                     "algorithms": ["PGDi*", "FGSM*", "BIM*", "SA"]},)

    def __post_init__(self):
        if self.n_natural < 1 or self.n_adversarial_per_attack < 1:
            raise ValidationError("sample counts must be at least 1")
        if not 0.0 <= self.fool_rate <= 1.0:
            raise ValidationError(f"fool_rate must lie in [0, 1], got {self.fool_rate!r}")
        if len(self.natural_profile) != 2 or min(self.natural_profile) <= 0:
            raise ValidationError("natural profile needs two positive Beta parameters")
        if not self.detector_profiles:
            raise ValidationError("at least one detector profile is required")
        profiles = tuple(p if isinstance(p, DetectorProfile) else DetectorProfile(**p)
                         for p in self.detector_profiles)
        object.__setattr__(self, "detector_profiles", profiles)
        object.__setattr__(self, "natural_profile", tuple(float(x) for x in self.natural_profile))
        object.__setattr__(self, "seed", int(self.seed))

    def groups(self) -> list:
        return parse_groups(list(self.cells))

    @classmethod
    def from_dict(cls, doc: dict) -> "SyntheticConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ParseError(f"unknown synthetic config keys: {sorted(unknown)}")
        doc = dict(doc)
        if "detector_profiles" in doc:
            doc["detector_profiles"] = tuple(DetectorProfile(**p) for p in doc["detector_profiles"])
        if "cells" in doc:
            doc["cells"] = tuple(doc["cells"])
        return cls(**doc)


def read_synthetic_config(path=None) -> SyntheticConfig:
    src = default_synthetic_path() if path is None else path
    try:
        with open(src, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read synthetic config: {exc.strerror}", path=path) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, path) from None
    try:
        return SyntheticConfig.from_dict(doc)
    except TypeError as exc:
        raise ParseError(str(exc), path=path) from None


def generate_synthetic(config: SyntheticConfig) -> list:
    """Draw a reproducible score file from per-detector Beta profiles.

    Draw order is fixed: natural scores (sample-major, detector-minor), then
    for each group in config order and each member in sorted order, the
    fooled flags followed by one score column per detector. All draws come
    from ``numpy.random.Generator(PCG64(seed))``.
    """
    rng = np.random.Generator(np.random.PCG64(config.seed))
    k = len(config.detector_profiles)
    width = max(5, len(str(max(config.n_natural, config.n_adversarial_per_attack) - 1)))
    ids = [f"s{i:0{width}d}" for i in range(max(config.n_natural, config.n_adversarial_per_attack))]

    records = []
    nat = rng.beta(*config.natural_profile, size=(config.n_natural, k))
    for i in range(config.n_natural):
        records.append(ScoreRecord(ids[i], Role.NATURAL, tuple(nat[i].tolist())))

    n = config.n_adversarial_per_attack
    for group in config.groups():
        for attack in group.sorted_members():
            fooled = rng.random(n) < config.fool_rate
            cols = []
            for prof in config.detector_profiles:
                ab = prof.on if (attack.loss is not None and attack.loss == prof.specialty) else prof.off
                cols.append(rng.beta(*ab, size=n))
            block = np.column_stack(cols)
            for i in range(n):
                records.append(ScoreRecord(ids[i], Role.ADVERSARIAL, tuple(block[i].tolist()),
                                           attack, bool(fooled[i])))
    return records


def synthetic_header(config: SyntheticConfig) -> list:
    return [f"generator: {PRNG_NAME} seed={config.seed}",
            "detectors: " + ",".join(p.name or f"det_{i}" for i, p in enumerate(config.detector_profiles))]


# -- reports -----------------------------------------------------------------

def _finite_or_none(x):
    return None if isinstance(x, float) and not math.isfinite(x) else x


def _metrics_dict(m) -> dict:
    return {k: _finite_or_none(v) for k, v in asdict(m).items()}


def report_to_dict(report) -> dict:
    """Plain-data view of an EvaluationReport; an infinite threshold becomes ``None``."""
    return {
        "target_tpr": report.target_tpr,
        "mean_auroc": report.mean_auroc,
        "mean_fpr_at_95_tpr": report.mean_fpr_at_95_tpr,
        "n_records": report.n_records,
        "n_solves": report.n_solves,
        "n_unconverged": report.n_unconverged,
        "skipped_groups": list(report.skipped_groups),
        "groups": [_metrics_dict(m) for m in report.groups],
        "baselines": {name: [_metrics_dict(m) for m in ms] for name, ms in report.baselines.items()},
    }


def write_report(path, report):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2, allow_nan=False)
        fh.write("\n")


def format_report(report) -> str:
    """Human-readable table: one line per (detector, group)."""
    lines = [f"{'detector':<10} {'group':<14} {'members':>7} {'AUROC%':>7} {'FPR95%':>7} "
             f"{'n_pos':>6} {'n_neg':>6} {'capacity':>9}"]
    rows = [("mixture", report.groups)] + list(report.baselines.items())
    for name, metrics in rows:
        for m in metrics:
            lines.append(f"{name:<10} {m.label:<14} {m.n_members:>7d} {100 * m.auroc:>7.2f} "
                         f"{100 * m.fpr_at_95_tpr:>7.2f} {m.n_positives:>6d} {m.n_negatives:>6d} "
                         f"{m.mean_capacity:>9.5f}")
    lines.append(f"mean mixture AUROC {100 * report.mean_auroc:.2f}%, "
                 f"FPR@{100 * report.target_tpr:g}%TPR {100 * report.mean_fpr_at_95_tpr:.2f}%; "
                 f"{report.n_solves} solves, {report.n_unconverged} hit the iteration cap")
    if report.skipped_groups:
        lines.append("groups without records: " + ", ".join(report.skipped_groups))
    return "\n".join(lines)


def _safe_label(label: str) -> str:
    return label.replace("/", "_")


def write_roc_dump(directory, report) -> list:
    """Write ``<detector>__<group>.csv`` files with threshold,fpr,tpr columns."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, curves in report.roc.items():
        for label, (thr, fpr, tpr) in curves.items():
            path = os.path.join(directory, f"{name}__{_safe_label(label)}.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["threshold", "fpr", "tpr"])
                for t, f, p in zip(thr, fpr, tpr):
                    w.writerow([_fmt_float(t), _fmt_float(f), _fmt_float(p)])
            written.append(path)
    return written
