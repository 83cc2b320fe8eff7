"""CSV ingestion, JSON run reports and power-curve CSV output."""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from quantest.core import Sample, TestConfig, TestOutcome
from quantest.errors import InputError, ParseError, TooFewGroups

SCHEMA_VERSION = "1"
SMALL_N_WARNING = 50


# ---------------------------------------------------------------------------
# CSV input
# ---------------------------------------------------------------------------


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _rows(path: Path) -> Iterable[tuple[int, list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row]
            if not any(cells):
                continue
            yield lineno, cells


def read_group_file(path) -> Sample:
    """One group per file: a single numeric column with an optional header."""
    path = Path(path)
    values = []
    first = True
    for lineno, cells in _rows(path):
        if len(cells) != 1:
            raise ParseError(path, lineno, 2, f"expected a single column, found {len(cells)}")
        cell = cells[0]
        if first and not _is_number(cell):
            first = False
            continue
        first = False
        try:
            values.append(float(cell))
        except ValueError:
            raise ParseError(path, lineno, 1, f"not a number: {cell!r}") from None
    return Sample(values, label=path.stem)


def read_grouped_file(path) -> list[Sample]:
    """``group,value`` rows; groups keep their order of first appearance."""
    path = Path(path)
    groups: dict[str, list[float]] = {}
    first = True
    for lineno, cells in _rows(path):
        if len(cells) != 2:
            raise ParseError(path, lineno, len(cells), f"expected 2 columns (group,value), found {len(cells)}")
        label, cell = cells
        if first and not _is_number(cell):
            first = False
            continue
        first = False
        try:
            value = float(cell)
        except ValueError:
            raise ParseError(path, lineno, 2, f"not a number: {cell!r}") from None
        groups.setdefault(label, []).append(value)
    return [Sample(v, label=k) for k, v in groups.items()]


def parse_samples(paths: Sequence | None = None, grouped=None) -> list[Sample]:
    """Read samples from per-group files or from one grouped file.

    The resulting order defines the contrast order of the test.
    """
    if (paths is None) == (grouped is None):
        raise InputError("give either per-group files or one grouped file")
    if grouped is not None:
        samples = read_grouped_file(grouped)
    else:
        samples = [read_group_file(p) for p in paths]
    if len(samples) < 2:
        raise TooFewGroups(f"need at least 2 groups, got {len(samples)}")
    return samples


# ---------------------------------------------------------------------------
# JSON report
# ---------------------------------------------------------------------------


def format_float(x: float) -> str:
    """17 significant digits, always recognisable as a float."""
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(c in s for c in ".eE"):
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{_encode(str(k), indent, level)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


@dataclass(frozen=True)
class GroupSummary:
    label: str
    n: int
    median: float
    bandwidth: float
    density_at_median: float


@dataclass(frozen=True)
class RunReport:
    config: dict
    statistic: float
    df: int
    p_value: float
    reject: bool
    groups: tuple[GroupSummary, ...]
    warnings: tuple[str, ...] = ()
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "config": dict(self.config),
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "reject": self.reject,
            "groups": [asdict(g) for g in self.groups],
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(
            schema_version=d["schema_version"],
            config=dict(d["config"]),
            statistic=d["statistic"],
            df=d["df"],
            p_value=d["p_value"],
            reject=d["reject"],
            groups=tuple(GroupSummary(**g) for g in d["groups"]),
            warnings=tuple(d["warnings"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def config_echo(config: TestConfig) -> dict:
    return {
        "quantile": config.quantile.p,
        "alpha": config.alpha,
        "kernel": config.kernel.value,
        "bandwidth_const": config.bandwidth_const,
        "dispersion_rule": config.dispersion_rule.value,
    }


def collect_warnings(samples: Sequence[Sample]) -> list[str]:
    out = []
    for s in samples:
        if s.n < SMALL_N_WARNING:
            out.append(
                f"group {s.label!r} has n={s.n} < {SMALL_N_WARNING}; "
                "the chi-square approximation may be inaccurate"
            )
        n_unique = len(set(s.values.tolist()))
        if n_unique < s.n:
            out.append(f"group {s.label!r} contains {s.n - n_unique} tied value(s)")
    return out


def build_report(samples: Sequence[Sample], config: TestConfig, outcome: TestOutcome) -> RunReport:
    groups = tuple(
        GroupSummary(label=s.label, n=s.n, median=m, bandwidth=b, density_at_median=f)
        for s, m, b, f in zip(samples, outcome.medians, outcome.bandwidths, outcome.density_at_median)
    )
    return RunReport(
        config=config_echo(config),
        statistic=outcome.statistic,
        df=outcome.df,
        p_value=outcome.p_value,
        reject=outcome.reject,
        groups=groups,
        warnings=tuple(collect_warnings(samples)),
    )


def format_text(report: RunReport, critical_value: float | None = None) -> str:
    lines = [
        f"statistic  {report.statistic:.6g}",
        f"df         {report.df}",
        f"p-value    {report.p_value:.6g}",
    ]
    if critical_value is not None:
        lines.append(f"critical   {critical_value:.6g}")
    alpha = report.config.get("alpha")
    lines.append(f"decision   {'reject' if report.reject else 'do not reject'} H0 at alpha={alpha:g}")
    lines.append("")
    width = max(5, *(len(g.label) for g in report.groups))
    lines.append(f"{'group':<{width}}  {'n':>7}  {'quantile':>12}  {'bandwidth':>10}  {'density':>10}")
    for g in report.groups:
        lines.append(
            f"{g.label:<{width}}  {g.n:>7d}  {g.median:>12.6g}  {g.bandwidth:>10.4g}  {g.density_at_median:>10.4g}"
        )
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Power-curve output
# ---------------------------------------------------------------------------

POWER_HEADER = "delta,power,mc_stderr,errors"


def power_csv(points) -> str:
    rows = [POWER_HEADER]
    rows += [f"{p.delta!r},{p.power!r},{p.mc_stderr!r},{p.errors}" for p in points]
    return "\n".join(rows) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
