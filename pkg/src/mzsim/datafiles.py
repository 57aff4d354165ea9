"""Flat-file formats: records CSV, counts CSV and the run manifest.

Floats are written with ``repr`` (shortest string that round-trips), so a
file read back and rewritten is byte-identical.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from .trials import (
    Coin,
    CountsRow,
    CountsTable,
    ExperimentPlan,
    Mode,
    Outcome,
    TrialRecord,
)

RECORDS_HEADER = ("setting_index", "trial_index", "phi_nominal", "phi_realized", "coin", "outcome")
COUNTS_HEADER = ("phi_nominal", "n_L", "n_R")


class MalformedFile(ValueError):
    pass


def _f(x: float) -> str:
    return repr(float(x))


def format_records(records) -> str:
    lines = [",".join(RECORDS_HEADER)]
    lines.extend(
        f"{r.setting_index},{r.trial_index},{_f(r.phi_nominal)},{_f(r.phi_realized)},"
        f"{r.coin.value},{r.outcome.value}"
        for r in records
    )
    return "\n".join(lines) + "\n"


def write_records(path: str | Path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_records(records))


def _rows(path: str | Path, header: tuple[str, ...]) -> list[list[str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MalformedFile(f"{path}: empty file")
    if tuple(rows[0]) != header:
        raise MalformedFile(f"{path}: expected header {','.join(header)}")
    return rows[1:]


def read_records(path: str | Path) -> list[TrialRecord]:
    out = []
    for lineno, row in enumerate(_rows(path, RECORDS_HEADER), start=2):
        try:
            s, t, pn, pr, coin, outcome = row
            out.append(
                TrialRecord(int(s), int(t), float(pn), Coin(coin), float(pr), Outcome(outcome))
            )
        except ValueError as exc:
            raise MalformedFile(f"{path}:{lineno}: {exc}") from None
    return out


def format_counts(table: CountsTable) -> str:
    buf = io.StringIO()
    buf.write(",".join(COUNTS_HEADER) + "\n")
    for row in table:
        buf.write(f"{_f(row.phi_nominal)},{row.n_L},{row.n_R}\n")
    return buf.getvalue()


def write_counts(path: str | Path, table: CountsTable) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_counts(table))


def read_counts(path: str | Path) -> CountsTable:
    rows = []
    for lineno, row in enumerate(_rows(path, COUNTS_HEADER), start=2):
        try:
            phi, n_L, n_R = row
            r = CountsRow(float(phi), int(n_L), int(n_R))
        except ValueError as exc:
            raise MalformedFile(f"{path}:{lineno}: {exc}") from None
        if r.n_L < 0 or r.n_R < 0:
            raise MalformedFile(f"{path}:{lineno}: negative count")
        rows.append(r)
    return CountsTable(tuple(rows))


# -- manifest -----------------------------------------------------------------

_PLAN_KEYS = ("mode", "phi_start", "phi_step", "n_settings", "trials_per_setting", "sigma", "seed")


@dataclass
class RunManifest:
    plan: ExperimentPlan
    tool_version: str
    timestamp: str
    outputs: dict[str, str] = field(default_factory=dict)

    def to_text(self) -> str:
        p = self.plan
        items = [
            ("tool_version", self.tool_version),
            ("timestamp", self.timestamp),
            ("mode", p.mode.value),
            ("phi_start", _f(p.phi_start)),
            ("phi_step", _f(p.phi_step)),
            ("n_settings", str(p.n_settings)),
            ("trials_per_setting", str(p.trials_per_setting)),
            ("sigma", _f(p.sigma)),
            ("seed", str(p.seed)),
        ]
        items.extend(sorted(self.outputs.items()))
        return "".join(f"{k}={v}\n" for k, v in items)

    @classmethod
    def from_text(cls, text: str) -> "RunManifest":
        values: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise MalformedFile(f"manifest line {lineno}: expected key=value")
            values[key.strip()] = value.strip()
        missing = [k for k in _PLAN_KEYS if k not in values]
        if missing:
            raise MalformedFile(f"manifest missing keys: {', '.join(missing)}")
        try:
            plan = ExperimentPlan(
                mode=Mode(values.pop("mode")),
                phi_start=float(values.pop("phi_start")),
                phi_step=float(values.pop("phi_step")),
                n_settings=int(values.pop("n_settings")),
                trials_per_setting=int(values.pop("trials_per_setting")),
                sigma=float(values.pop("sigma")),
                seed=int(values.pop("seed")),
            )
        except ValueError as exc:
            raise MalformedFile(f"manifest: {exc}") from None
        return cls(
            plan=plan,
            tool_version=values.pop("tool_version", ""),
            timestamp=values.pop("timestamp", ""),
            outputs=values,
        )

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def read(cls, path: str | Path) -> "RunManifest":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))
