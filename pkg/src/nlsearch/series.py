"""Run configurations and series files: CSV, JSON, and SVG emission.

A SeriesFile is a header (the full RunConfig, column names, free-form meta)
plus a rectangular block of float columns.  The CSV form keeps the metadata
on '#'-prefixed lines so the data block stays loadable by anything; floats
are printed with 17 significant digits, so re-running the embedded config
reproduces every numeric column bit-identically on the same machine.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError

_MAGIC = "# nlsearch series"


@dataclass
class RunConfig:
    """Everything needed to reproduce one CLI invocation."""

    command: str
    kind: str = "cubic"
    N: int | None = None
    k: int | None = None
    g_rule: str = "const:0"
    k_rule: str | None = None
    epsilon: float = 0.01
    tol: float = 1e-10
    sweep: list[int] | None = None        # [start, end, step]
    out: str | None = None
    format: str = "csv"
    t_end: float | None = None
    samples: int = 1001
    grid: int = 401
    which: str | None = None
    kappa: str | None = None
    lam: str | None = None
    sigma: str | None = None
    jobs: int | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))


@dataclass
class SeriesFile:
    """One rectangular result block plus enough metadata to re-run it."""

    config: RunConfig
    columns: list[str]
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError:
            raise KeyError(f"no column {name!r}; have {self.columns}") from None


# ------------------------------------------------------------- rules

def eval_g_rule(rule: str, N: int, k: int) -> float:
    """Evaluate a g rule at (N, k).

    Grammar: ``const:<v>``, ``pow:<e>`` (g = N^e), ``pow_over_logR:<e>``
    (g = R^e / log R with R = N/k), ``pow_over_logNk:<e>`` (g = N^e / log(N/k)).
    A bare number is shorthand for ``const:``.
    """
    name, sep, arg = rule.partition(":")
    if not sep:
        name, arg = "const", rule
    try:
        v = float(arg)
    except ValueError:
        raise DomainError(f"malformed g rule {rule!r}") from None
    try:
        if name == "const":
            g = v
        elif name == "pow":
            g = float(N) ** v
        elif name == "pow_over_logR":
            r = N / k
            g = r ** v / math.log(r)
        elif name == "pow_over_logNk":
            g = float(N) ** v / math.log(N / k)
        else:
            raise DomainError(f"unknown g rule {name!r}")
    except OverflowError:
        g = math.inf
    if not (math.isfinite(g) and g >= 0.0):
        raise DomainError(f"g rule {rule!r} gives g = {g} at N = {N}, k = {k}")
    return g


def eval_k_rule(rule: str | None, N: int) -> int:
    """``const:<v>`` or ``pow:<e>`` (k = ceil(N^e), clamped to [1, N-1])."""
    if rule is None:
        return 1
    name, sep, arg = rule.partition(":")
    if not sep:
        name, arg = "const", rule
    try:
        v = float(arg)
    except ValueError:
        raise DomainError(f"malformed k rule {rule!r}") from None
    if name == "const":
        k = int(v)
        if k != v:
            raise DomainError(f"k rule const needs an integer, got {rule!r}")
    elif name == "pow":
        k = math.ceil(N ** v)
    else:
        raise DomainError(f"unknown k rule {name!r}")
    return min(max(k, 1), N - 1)


def parse_sweep(text: str) -> list[int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"sweep must be start:end:step, got {text!r}")
    try:
        start, end, step = (int(p) for p in parts)
    except ValueError:
        raise DomainError(f"sweep needs integers, got {text!r}") from None
    if step <= 0 or end < start:
        raise DomainError(f"need start <= end and step > 0, got {text!r}")
    return [start, end, step]


def sweep_values(sweep: list[int]) -> list[int]:
    start, end, step = sweep
    return list(range(start, end + 1, step))


# ------------------------------------------------------------- writers

def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def csv_text(sf: SeriesFile) -> str:
    buf = io.StringIO()
    buf.write(_MAGIC + "\n")
    buf.write(f"# config: {sf.config.to_json()}\n")
    buf.write(f"# meta: {json.dumps(sf.meta, sort_keys=True)}\n")
    buf.write("# columns: " + ",".join(sf.columns) + "\n")
    for row in np.atleast_2d(sf.data):
        if row.size:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def json_text(sf: SeriesFile) -> str:
    return json.dumps({
        "config": json.loads(sf.config.to_json()),
        "meta": sf.meta,
        "columns": sf.columns,
        "data": np.atleast_2d(sf.data).tolist() if sf.data.size else [],
    }, sort_keys=True, indent=1)


def parse_csv_text(text: str) -> SeriesFile:
    if not text.lstrip().startswith(_MAGIC):
        raise DomainError(f"not a series file: missing {_MAGIC!r} header")
    config = None
    meta = {}
    columns = []
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("# config: "):
            config = RunConfig.from_json(line[len("# config: "):])
        elif line.startswith("# meta: "):
            meta = json.loads(line[len("# meta: "):])
        elif line.startswith("# columns: "):
            columns = line[len("# columns: "):].split(",")
        elif line.startswith("#"):
            continue
        else:
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError:
                raise DomainError(f"bad data row {line!r}") from None
    if config is None:
        raise DomainError("not a series file: missing '# config:' header")
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(columns)))
    return SeriesFile(config=config, columns=columns, data=data, meta=meta)


def parse_json_text(text: str) -> SeriesFile:
    obj = json.loads(text)
    cols = list(obj["columns"])
    rows = obj["data"]
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(cols)))
    return SeriesFile(config=RunConfig(**obj["config"]), columns=cols,
                      data=data, meta=obj.get("meta", {}))


def read_series(path: str) -> SeriesFile:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return parse_json_text(text)
    return parse_csv_text(text)


def _csv_twin_path(path: str) -> str:
    return (path[:-4] if path.endswith(".svg") else path) + ".csv"


def _write_svg(sf: SeriesFile, path: str):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plot = sf.meta.get("plot", {})
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    pairs = plot.get("pairs")
    if pairs is None and len(sf.columns) >= 2:
        pairs = [[0, j, sf.columns[j]] for j in range(1, len(sf.columns))]
    for xi, yi, label in pairs or []:
        ax.plot(sf.data[:, int(xi)], sf.data[:, int(yi)], label=str(label))
    if plot.get("loglog"):
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(plot.get("xlabel", sf.columns[0] if sf.columns else ""))
    ax.set_ylabel(plot.get("ylabel", ""))
    if plot.get("title"):
        ax.set_title(plot["title"])
    if pairs and len(pairs) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def write_series(sf: SeriesFile, path: str | None = None) -> list[str]:
    """Write per the config's format; returns the list of files written.

    SVG output always gets a data-only CSV twin next to it, holding exactly
    the numbers behind the plot.  With no path, CSV/JSON text goes to stdout.
    """
    fmt = sf.config.format
    if path is None:
        path = sf.config.out
    if path is None:
        if fmt == "svg":
            raise DomainError("svg output needs --out <path>")
        print(csv_text(sf) if fmt == "csv" else json_text(sf), end="")
        return []
    if fmt == "csv":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(csv_text(sf))
        return [path]
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json_text(sf))
        return [path]
    if fmt == "svg":
        twin = _csv_twin_path(path)
        with open(twin, "w", encoding="utf-8") as fh:
            fh.write(csv_text(sf))
        _write_svg(sf, path)
        return [path, twin]
    raise DomainError(f"unknown format {fmt!r}")
