"""Tables T1-T5 and the Figure 1 curves, with CSV / JSON / text / SVG emitters.

CSV and JSON carry full precision (CSV uses 17 significant digits, which
round-trips every double); the text rendering uses the precision each column
uses in the reference tables.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

from .branching import extinction_curve, extinction_probability, extinction_time_pmf
from .errors import ParameterDomainError
from .estimation import poisson_mle, repeated_moment_estimate
from .offspring import Janardan, OffspringModel, Poisson, sample

DEFAULT_SEED = 19800101
TABLE_IDS = ("T1", "T2", "T3", "T4", "T5")

T1_LAMBDAS = (1.5, 2.0, 3.0, 4.5, 6.0)
T1_MU_OFFSET = 1e-4
T2_GENERATIONS = (1, 4, 5, 10, 15, 20)
T3_GENERATIONS = (1, 5, 10, 15, 20)
T4_GENERATIONS = (1, 5, 10, 15, 20)
T5_PARAMS = ((0.8, 0.4), (2.0, 1.9), (2.0, 1.0))
T5_SAMPLE_SIZE = 1000


@dataclass(frozen=True)
class TableSpec:
    id: str
    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    # one format spec per column, used only by to_text
    formats: tuple[str, ...]
    config: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def value(self, row_label, column: str):
        """Cell of the row whose first entry equals ``row_label``."""
        i = self.columns.index(column)
        for row in self.rows:
            if row[0] == row_label:
                return row[i]
        raise KeyError(row_label)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_full_precision(v) for v in row])
        return out.getvalue()

    def to_json(self) -> str:
        doc = {"id": self.id, "config": self.config, "columns": list(self.columns),
               "rows": [list(r) for r in self.rows]}
        return json.dumps(doc, indent=2) + "\n"

    def to_text(self) -> str:
        cells = [list(self.columns)]
        for row in self.rows:
            cells.append([_display(v, f) for v, f in zip(row, self.formats)])
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.columns))]
        lines = [self.title, ""] if self.title else []
        for k, r in enumerate(cells):
            lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
            if k == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        if fmt == "text":
            return self.to_text()
        raise ParameterDomainError(f"unknown format {fmt!r}")


def _full_precision(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _display(v, fmt):
    if isinstance(v, bool) or isinstance(v, str):
        return str(v)
    return format(v, fmt)


def parse_csv(text: str) -> tuple[list[str], list[list]]:
    """Inverse of :meth:`TableSpec.to_csv` for numeric tables."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = []
    for raw in reader:
        row = []
        for cell in raw:
            try:
                row.append(int(cell))
            except ValueError:
                try:
                    row.append(float(cell))
                except ValueError:
                    row.append(cell)
        rows.append(row)
    return header, rows


def _model_config(model: OffspringModel) -> dict:
    if isinstance(model, Janardan):
        return {"law": "janardan", "lambda": model.lam, "mu": model.mu}
    if isinstance(model, Poisson):
        return {"law": "poisson", "lambda": model.lam}
    return {"law": "bernoulli", "p": model.p}


def table1(lambdas=T1_LAMBDAS, mu_offset: float = T1_MU_OFFSET) -> TableSpec:
    """Extinction probabilities of Poisson(lam) and Janardan(lam, lam - mu_offset).

    ``pm``/``jm`` repeat the reference computation (R's uniroot.all over [0, 1]
    at its default tolerance); ``pm_exact``/``jm_exact`` are the roots to
    machine precision.
    """
    lambdas = tuple(float(x) for x in lambdas)
    if not lambdas or min(lambdas) <= 1.0:
        raise ParameterDomainError("table 1 compares supercritical laws: every lambda must exceed 1")
    if not 0.0 < mu_offset < min(lambdas):
        raise ParameterDomainError("mu_offset must lie in (0, min lambda)")
    rows = []
    for lam in lambdas:
        pm, jm = Poisson(lam), Janardan(lam, lam - mu_offset)
        rows.append((lam, jm.mu,
                     extinction_probability(pm, method="uniroot"),
                     extinction_probability(jm, method="uniroot"),
                     extinction_probability(pm), extinction_probability(jm)))
    return TableSpec(
        "T1", "Table 1: probability of extinction for Poisson (PM) and Janardan (JM) offspring",
        ("lambda", "mu", "pm", "jm", "pm_exact", "jm_exact"), tuple(rows),
        ("g", "g", ".7g", ".7g", ".10g", ".10g"),
        {"lambdas": list(lambdas), "mu_offset": mu_offset,
         "solver": "pm/jm: uniroot.all(n=100, tol=eps^0.2); *_exact: bisection"})


def table_curves(configs, generations, table_id: str = "T2", title: str = "", fmt: str = ".10f") -> TableSpec:
    """Extinction-curve values q_n at the given generations, one column per (label, model)."""
    generations = tuple(int(g) for g in generations)
    if not generations or min(generations) < 1:
        raise ParameterDomainError("generations must be positive")
    horizon = max(generations)
    curves = [(label, extinction_curve(model, horizon)) for label, model in configs]
    rows = tuple((g, *(c.at(g) for _, c in curves)) for g in generations)
    return TableSpec(table_id, title, ("generation", *(label for label, _ in curves)), rows,
                     ("d",) + (fmt,) * len(curves),
                     {"generations": list(generations),
                      "models": {label: _model_config(m) for label, m in configs}})


def table2() -> TableSpec:
    configs = [(f"PM lambda={lam:g}", Poisson(lam)) for lam in (0.8, 2.0, 8.0)]
    return table_curves(configs, T2_GENERATIONS, "T2",
                        "Table 2: probability of extinction by generation n, Poisson model", ".10f")


def table3() -> TableSpec:
    configs = [(f"JM lambda={lam:g} mu={mu:g}", Janardan(lam, mu))
               for lam, mu in ((0.8, 0.4), (2.0, 0.2), (2.0, 1.0), (2.0, 1.9))]
    return table_curves(configs, T3_GENERATIONS, "T3",
                        "Table 3: cumulative probability of extinction by generation n, Janardan model", ".7f")


def table4(configs=None, generations=T4_GENERATIONS) -> TableSpec:
    """Pr(T = n), the probability that extinction happens exactly at generation n."""
    if configs is None:
        configs = [("PM lambda=0.8", Poisson(0.8)), ("JM lambda=0.8 mu=0.4", Janardan(0.8, 0.4)),
                   ("JM lambda=2 mu=0.2", Janardan(2.0, 0.2))]
        formats = (".2e", ".2e", ".8g")
    else:
        formats = (".8g",) * len(configs)
    generations = tuple(int(g) for g in generations)
    horizon = max(generations)
    dists = [(label, extinction_time_pmf(model, horizon)) for label, model in configs]
    rows = tuple((g, *(d.at(g) for _, d in dists)) for g in generations)
    return TableSpec("T4", "Table 4: probability that extinction occurs at generation n",
                     ("generation", *(label for label, _ in dists)), rows, ("d",) + formats,
                     {"generations": list(generations),
                      "models": {label: _model_config(m) for label, m in configs}})


def table5(params=T5_PARAMS, n: int = T5_SAMPLE_SIZE, seed: int = DEFAULT_SEED) -> TableSpec:
    """Estimates from freshly simulated samples; row i uses stream i of ``seed``.

    The original samples were drawn with unrecorded seeds, so these values are
    a regeneration, not a copy.
    """
    rows = []
    for i, (lam, mu) in enumerate(params):
        freq = sample(Janardan(lam, mu), n, seed, stream=i)
        est = repeated_moment_estimate(freq)
        rows.append((float(lam), float(mu), est.lambda_hat, est.mu_hat, est.admissible, poisson_mle(freq)))
    return TableSpec(
        "T5", f"Table 5: parameters and repeated-moment estimates (regenerated, n={n}, seed={seed})",
        ("lambda", "mu", "lambda_hat", "mu_hat", "admissible", "poisson_mle"), tuple(rows),
        ("g", "g", ".5f", ".5f", "", ".4f"),
        {"n": n, "seed": seed, "regenerated": True})


def build_table(table_id: str, seed: int = DEFAULT_SEED) -> TableSpec:
    builders = {"T1": table1, "T2": table2, "T3": table3, "T4": table4}
    if table_id == "T5":
        return table5(seed=seed)
    if table_id not in builders:
        raise ParameterDomainError(f"unknown table id {table_id!r}; expected one of {', '.join(TABLE_IDS)}")
    return builders[table_id]()


@dataclass(frozen=True)
class Series:
    name: str
    values: tuple[float, ...]
    style: str  # "solid" or "dashed"


@dataclass(frozen=True)
class FigureData:
    generations: tuple[int, ...]
    series: tuple[Series, ...]
    title: str = ""

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["generation", *(s.name for s in self.series)])
        for i, g in enumerate(self.generations):
            w.writerow([g, *(format(s.values[i], ".17g") for s in self.series)])
        return out.getvalue()

    def to_json(self) -> str:
        doc = {"id": "figure1", "config": {"title": self.title},
               "columns": ["generation", *(s.name for s in self.series)],
               "styles": {s.name: s.style for s in self.series},
               "rows": [[g, *(s.values[i] for s in self.series)] for i, g in enumerate(self.generations)]}
        return json.dumps(doc, indent=2) + "\n"

    def to_svg(self, width: int = 800, height: int = 600) -> str:
        left, right, top, bottom = 70, 200, 50, 60
        pw, ph = width - left - right, height - top - bottom
        g0, g1 = self.generations[0], self.generations[-1]
        span = max(g1 - g0, 1)

        def x(g):
            return left + (g - g0) / span * pw

        def y(v):
            return top + (1.0 - v) * ph

        colors = ("#1f77b4", "#d62728", "#2ca02c", "#000000", "#9467bd", "#ff7f0e")
        parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect width="{width}" height="{height}" fill="white"/>',
            f'<text x="{width / 2:.1f}" y="28" text-anchor="middle" font-family="sans-serif" '
            f'font-size="16">{escape(self.title)}</text>',
            f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
            f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
        ]
        for k in range(6):
            v = k / 5
            parts.append(f'<line x1="{left - 5}" y1="{y(v):.2f}" x2="{left}" y2="{y(v):.2f}" stroke="black"/>')
            parts.append(f'<text x="{left - 8}" y="{y(v) + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                         f'font-size="12">{v:.1f}</text>')
        for g in self.generations:
            if g == g0 or g == g1 or g % 5 == 0:
                parts.append(f'<line x1="{x(g):.2f}" y1="{top + ph}" x2="{x(g):.2f}" y2="{top + ph + 5}" '
                             'stroke="black"/>')
                parts.append(f'<text x="{x(g):.2f}" y="{top + ph + 20}" text-anchor="middle" '
                             f'font-family="sans-serif" font-size="12">{g}</text>')
        parts.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle" '
                     'font-family="sans-serif" font-size="14">generation</text>')
        parts.append(f'<text x="20" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
                     f'font-size="14" transform="rotate(-90 20 {top + ph / 2:.1f})">Pr(X_n = 0)</text>')
        for i, s in enumerate(self.series):
            color = colors[i % len(colors)]
            pts = " ".join(f"{x(g):.2f},{y(v):.2f}" for g, v in zip(self.generations, s.values))
            dash = ' stroke-dasharray="8,5"' if s.style == "dashed" else ""
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"{dash}/>')
            ly = top + 20 + 22 * i
            parts.append(f'<line x1="{left + pw + 15}" y1="{ly}" x2="{left + pw + 45}" y2="{ly}" '
                         f'stroke="{color}" stroke-width="2"{dash}/>')
            parts.append(f'<text x="{left + pw + 52}" y="{ly + 4}" font-family="sans-serif" '
                         f'font-size="12">{escape(s.name)}</text>')
        parts.append("</svg>")
        return "\n".join(parts) + "\n"


def figure1(n_generations: int = 20) -> FigureData:
    """Extinction curves of JM(2, mu) for mu in {0.2, 1, 1.9} (solid) and PM(2) (dashed)."""
    specs = [("JM mu=0.2", Janardan(2.0, 0.2), "solid"), ("JM mu=1", Janardan(2.0, 1.0), "solid"),
             ("JM mu=1.9", Janardan(2.0, 1.9), "solid"), ("PM lambda=2", Poisson(2.0), "dashed")]
    series = tuple(Series(name, tuple(float(v) for v in extinction_curve(model, n_generations).q), style)
                   for name, model, style in specs)
    return FigureData(tuple(range(1, n_generations + 1)), series,
                      "Probability of extinction by generation, lambda = 2")


def write_outputs(outdir: str | Path, table_ids=TABLE_IDS, fmt: str = "csv", figure: bool = True,
                  svg: bool = False, seed: int = DEFAULT_SEED) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    ext = {"csv": "csv", "json": "json", "text": "txt"}[fmt]
    written = []
    for tid in table_ids:
        path = outdir / f"{tid}.{ext}"
        path.write_text(build_table(tid, seed).render(fmt), encoding="utf-8", newline="\n")
        written.append(path)
    if figure:
        fig = figure1()
        path = outdir / f"figure1.{'json' if fmt == 'json' else 'csv'}"
        path.write_text(fig.to_json() if fmt == "json" else fig.to_csv(), encoding="utf-8", newline="\n")
        written.append(path)
        if svg:
            path = outdir / "figure1.svg"
            path.write_text(fig.to_svg(), encoding="utf-8", newline="\n")
            written.append(path)
    return written
