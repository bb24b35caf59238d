"""Static figures for result tables: matplotlib PNGs and plain gnuplot scripts.

Both renderers read only the table columns and metadata, so a figure can be
regenerated from a saved CSV/JSON file without rerunning the computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .io import ResultTable


@dataclass(frozen=True)
class FigureLayout:
    x: str
    ys: tuple
    xlabel: str
    ylabel: str
    logy: bool = False
    style: str = "lines"


FIGURES = {
    "lanczos": FigureLayout("n", ("b_n",), "n", "b_n", style="points"),
    "microcanonical": FigureLayout("n", ("b_n", "f", "g"), "n", "b_n, f(n), g(n)", style="points"),
    "classical-lanczos": FigureLayout("n", ("b_n",), "n", "b_n", style="points"),
    "kcomplexity": FigureLayout("t", ("K",), "t", "K(t)", logy=True),
    "otoc": FigureLayout("t", ("OTOC",), "t", "OTOC(t)", logy=True),
    "classical-alpha": FigureLayout("E", ("two_alpha",), "E", "2 alpha(E)"),
    "fp-bound": FigureLayout("c", ("bound", "omega"), "c", "2 alpha bound, omega(c)"),
    "classical-saddles": FigureLayout("index", ("omega_saddle",), "fixed point", "omega_saddle", style="points"),
    "sweep": FigureLayout("value", ("alpha",), "swept value", "fitted slope", style="points"),
}


def figure_layout(table: ResultTable, command: str) -> FigureLayout:
    layout = FIGURES.get(command)
    if layout is None or layout.x not in table.columns:
        names = list(table.columns)
        return FigureLayout(names[0], tuple(names[1:2]), names[0], names[1] if len(names) > 1 else "")
    return FigureLayout(layout.x, tuple(y for y in layout.ys if y in table.columns), layout.xlabel, layout.ylabel, layout.logy, layout.style)


def render_png(table: ResultTable, command: str, path) -> Path:
    """Draw the table with the Agg backend; returns the written path."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    layout = figure_layout(table, command)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    x = table.column(layout.x)
    for name in layout.ys:
        y = table.column(name)
        if layout.logy:
            keep = y > 0
            ax.semilogy(x[keep], y[keep], label=name)
        elif layout.style == "points":
            ax.plot(x, y, ".", ms=3, label=name)
        else:
            ax.plot(x, y, label=name)
    if command == "classical-alpha" and "reference_sqrt_2J_minus_1" in table.metadata:
        ax.axhline(float(table.metadata["reference_sqrt_2J_minus_1"]), color="k", lw=0.8, ls="--", label="sqrt(2J-1)")
    ax.set_xlabel(layout.xlabel)
    ax.set_ylabel(layout.ylabel)
    tags = [f"{k[7:]}={table.metadata[k]}" for k in ("config.model", "config.spin", "config.coupling") if k in table.metadata]
    ax.set_title(command + (" (" + ", ".join(tags) + ")" if tags else ""))
    if len(layout.ys) > 1 or command == "classical-alpha":
        ax.legend(frameon=False)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # no Software/date metadata so identical tables give identical files
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def gnuplot_script(table: ResultTable, command: str, csv_path) -> str:
    """Plain-text gnuplot script that plots ``csv_path`` (comment lines are skipped by gnuplot)."""
    layout = figure_layout(table, command)
    names = list(table.columns)
    csv_name = Path(csv_path).name
    png_name = Path(csv_path).with_suffix(".gp.png").name
    lines = [
        "set terminal pngcairo size 900,600",
        f"set output '{png_name}'",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{layout.xlabel}'",
        f"set ylabel '{layout.ylabel}'",
    ]
    if layout.logy:
        lines.append("set logscale y")
    with_ = "points pt 7 ps 0.4" if layout.style == "points" else "lines"
    xi = names.index(layout.x) + 1
    parts = [f"'{csv_name}' using {xi}:{names.index(y) + 1} with {with_}" for y in layout.ys]
    lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"


def write_gnuplot(table: ResultTable, command: str, csv_path) -> Path:
    out = Path(csv_path).with_suffix(".gp")
    out.write_text(gnuplot_script(table, command, csv_path))
    return out

