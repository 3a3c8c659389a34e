"""CSV ingestion, analysis reports, and simulation config files.

The analysis report serializes losslessly to JSON (binary64 round-trip) and
flattens to a fixed-schema CSV; the simulation config is a line-oriented
``key = value`` file so parse errors can point at the offending line.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources

from .core import IncomeSample
from .distributions import DistributionSpec, parse_distribution
from .errors import (
    ConfigError,
    MalformedNumber,
    MissingColumn,
    NegativeIncome,
    TooFewObservations,
)
from .simulation import (
    VALID_CI_METHODS,
    VALID_ESTIMATOR_METHODS,
    MonteCarloConfig,
    SimulationCellReport,
)

REPORT_CSV_HEADER = ["index", "method", "n", "q", "estimate", "ci_method", "lower", "upper", "alpha", "flags"]
SIMULATION_CSV_HEADER = ["dist", "params", "n", "index", "method", "bias", "mse", "coverage", "avg_length", "failures", "mc_se"]


@dataclass(frozen=True)
class IngestSummary:
    total_rows: int
    parsed: int
    dropped_empty: int


def ingest_csv(path: str, column: str, delimiter: str = ",") -> tuple[IncomeSample, IngestSummary]:
    """Read one income column from a headered CSV.

    ``column`` is a header name, or a 0-based position when it is an integer
    that does not match any header.  Blank cells are dropped (and counted);
    malformed or negative values abort with the offending 1-based data rows.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise TooFewObservations(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if column in header:
            col_idx = header.index(column)
        elif column.lstrip("-").isdigit() and 0 <= int(column) < len(header):
            col_idx = int(column)
        else:
            raise MissingColumn(f"{path}: no column {column!r} in header {header}")

        values: list[float] = []
        malformed: list[int] = []
        negative: list[int] = []
        dropped = 0
        total = 0
        for row_num, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            total += 1
            cell = row[col_idx].strip() if col_idx < len(row) else ""
            if not cell:
                dropped += 1
                continue
            try:
                v = float(cell)
            except ValueError:
                malformed.append(row_num)
                continue
            if v < 0:
                negative.append(row_num)
                continue
            values.append(v)

    if malformed:
        raise MalformedNumber(malformed)
    if negative:
        raise NegativeIncome(negative)
    if len(values) < 2:
        raise TooFewObservations(f"{path}: need >= 2 parseable incomes, got {len(values)}")
    return IncomeSample(values), IngestSummary(total_rows=total, parsed=len(values), dropped_empty=dropped)


# ---------------------------------------------------------------------------
# Analysis config and report


@dataclass(frozen=True)
class AnalysisConfig:
    input_path: str
    column: str
    poverty_line: float
    index: str = "both"  # sen | sst | both
    method: str = "all"  # ustat | plugin | davidson | all
    ci: str = "none"  # el | jel | normal | all | none
    alpha: float = 0.05
    output_format: str = "text"  # text | json | csv
    delimiter: str = ","
    include_timestamp: bool = True

    def __post_init__(self):
        if self.index not in ("sen", "sst", "both"):
            raise ConfigError(f"index must be sen, sst or both, got {self.index!r}")
        if self.method not in ("ustat", "plugin", "davidson", "all"):
            raise ConfigError(f"method must be ustat, plugin, davidson or all, got {self.method!r}")
        if self.ci not in ("el", "jel", "normal", "all", "none"):
            raise ConfigError(f"ci must be el, jel, normal, all or none, got {self.ci!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha}")
        if not self.poverty_line > 0.0:
            raise ConfigError(f"poverty line must be positive, got {self.poverty_line}")
        if self.output_format not in ("text", "json", "csv"):
            raise ConfigError(f"format must be text, json or csv, got {self.output_format!r}")

    def indices(self) -> list[str]:
        return ["sen", "sst"] if self.index == "both" else [self.index]

    def methods(self) -> list[str]:
        return ["ustat", "plugin", "davidson"] if self.method == "all" else [self.method]

    def ci_methods(self) -> list[str]:
        if self.ci == "none":
            return []
        return ["el", "jel", "normal"] if self.ci == "all" else [self.ci]


@dataclass(frozen=True)
class IntervalEntry:
    method: str
    lower: float
    upper: float
    level: float
    estimate: float
    ratio_evaluations: int | None = None
    bracket_expansions: int | None = None
    infeasible_endpoints: bool | None = None


@dataclass(frozen=True)
class EstimateEntry:
    method: str
    value: float
    no_poor: bool = False


@dataclass(frozen=True)
class IndexBlock:
    index: str
    q: int
    headcount: float
    income_gap_ratio: float | None
    gini_among_poor: float | None
    estimates: tuple[EstimateEntry, ...] = ()
    intervals: tuple[IntervalEntry, ...] = ()


@dataclass(frozen=True)
class AnalysisReport:
    input_path: str
    column: str
    poverty_line: float
    alpha: float
    n: int
    rows: IngestSummary
    blocks: tuple[IndexBlock, ...]
    timestamp: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        blocks = tuple(
            IndexBlock(
                index=b["index"],
                q=b["q"],
                headcount=b["headcount"],
                income_gap_ratio=b["income_gap_ratio"],
                gini_among_poor=b["gini_among_poor"],
                estimates=tuple(EstimateEntry(**e) for e in b["estimates"]),
                intervals=tuple(IntervalEntry(**i) for i in b["intervals"]),
            )
            for b in d["blocks"]
        )
        return cls(
            input_path=d["input_path"],
            column=d["column"],
            poverty_line=d["poverty_line"],
            alpha=d["alpha"],
            n=d["n"],
            rows=IngestSummary(**d["rows"]),
            blocks=blocks,
            timestamp=d.get("timestamp"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = _stdio.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_CSV_HEADER)
        for block in self.blocks:
            ci_rows = block.intervals or (None,)
            for est in block.estimates:
                flags = "no_poor" if est.no_poor else ""
                for ci in ci_rows:
                    if ci is None:
                        writer.writerow([block.index, est.method, self.n, block.q,
                                         f"{est.value:.6f}", "", "", "", f"{self.alpha:g}", flags])
                    else:
                        writer.writerow([block.index, est.method, self.n, block.q,
                                         f"{est.value:.6f}", ci.method, f"{ci.lower:.6f}",
                                         f"{ci.upper:.6f}", f"{self.alpha:g}", flags])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [
            f"input: {self.input_path} (column {self.column}; "
            f"{self.rows.parsed} incomes parsed, {self.rows.dropped_empty} empty dropped)",
            f"poverty line: {self.poverty_line:g}   n = {self.n}   alpha = {self.alpha:g}",
        ]
        for block in self.blocks:
            lines.append("")
            lines.append(f"[{block.index}]  q = {block.q}  headcount = {block.headcount:.6f}")
            if block.income_gap_ratio is not None:
                lines.append(f"  income gap ratio   = {block.income_gap_ratio:.6f}")
            if block.gini_among_poor is not None:
                lines.append(f"  gini among poor    = {block.gini_among_poor:.6f}")
            for est in block.estimates:
                flag = "  [no poor observations]" if est.no_poor else ""
                lines.append(f"  {est.method:<9} estimate = {est.value:.6f}{flag}")
            for ci in block.intervals:
                lines.append(
                    f"  {ci.method:<9} {100 * ci.level:g}% CI = [{ci.lower:.6f}, {ci.upper:.6f}]"
                )
        if self.timestamp:
            lines.append("")
            lines.append(f"generated: {self.timestamp}")
        return "\n".join(lines) + "\n"


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# ---------------------------------------------------------------------------
# Simulation config files


@dataclass
class SimulationSetup:
    config: MonteCarloConfig
    dists: list[DistributionSpec] = field(default_factory=list)


def _bundled_config_text(name: str) -> str | None:
    candidate = resources.files("povindex").joinpath("configs", f"{name}.cfg")
    if candidate.is_file():
        return candidate.read_text(encoding="utf-8")
    return None


def parse_simulation_config(source: str) -> SimulationSetup:
    """Parse a simulation config from a path or a bundled config name.

    Line-oriented ``key = value`` format; ``#`` starts a comment.  Keys:
    z, alpha, reps, seed, n (comma list), dist (repeatable), estimators,
    intervals (comma lists of index:method tokens).
    """
    text = _bundled_config_text(source)
    if text is None:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {source!r}: {exc}") from None
    scalars: dict[str, float] = {}
    n_grid: list[int] = []
    dists: list[DistributionSpec] = []
    estimators: list[str] = []
    intervals: list[str] = []

    for line_num, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=line_num)
        key, _, val = line.partition("=")
        key = key.strip().lower()
        val = val.strip()
        try:
            if key in ("z", "alpha"):
                scalars[key] = float(val)
            elif key in ("reps", "seed"):
                scalars[key] = int(val)
            elif key == "n":
                n_grid = [int(t) for t in val.replace(",", " ").split()]
            elif key == "dist":
                dists.append(parse_distribution(val))
            elif key == "estimators":
                estimators = [t.strip() for t in val.split(",") if t.strip()]
            elif key == "intervals":
                intervals = [t.strip() for t in val.split(",") if t.strip()]
            else:
                raise ConfigError(f"unknown key {key!r}", line=line_num)
        except ConfigError as exc:
            if exc.line is None:
                raise ConfigError(str(exc), line=line_num) from None
            raise
        except ValueError:
            raise ConfigError(f"bad value {val!r} for key {key!r}", line=line_num) from None

    for required in ("z", "reps", "seed"):
        if required not in scalars:
            raise ConfigError(f"missing required key {required!r}")
    if not n_grid:
        raise ConfigError("missing required key 'n'")
    if not dists:
        raise ConfigError("at least one 'dist' line is required")
    for tok in estimators:
        if tok not in VALID_ESTIMATOR_METHODS:
            raise ConfigError(f"unknown estimator method {tok!r}")
    for tok in intervals:
        if tok not in VALID_CI_METHODS:
            raise ConfigError(f"unknown interval method {tok!r}")
    try:
        config = MonteCarloConfig(
            reps=int(scalars["reps"]),
            seed=int(scalars["seed"]),
            n_grid=tuple(n_grid),
            z=scalars["z"],
            alpha=scalars.get("alpha", 0.05),
            estimators=tuple(estimators),
            intervals=tuple(intervals),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return SimulationSetup(config=config, dists=dists)


def simulation_reports_to_csv(reports: list[SimulationCellReport]) -> str:
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SIMULATION_CSV_HEADER)

    def fmt(v):
        return "" if v is None else f"{v:.6f}"

    for r in reports:
        writer.writerow([r.dist, r.params, r.n, r.index, r.method, fmt(r.bias),
                         fmt(r.mse), fmt(r.coverage), fmt(r.avg_length), r.failures,
                         f"{r.mc_se:.6f}"])
    return buf.getvalue()


def simulation_reports_to_json(reports: list[SimulationCellReport]) -> str:
    return json.dumps([asdict(r) for r in reports], indent=2)
