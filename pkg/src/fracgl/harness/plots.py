"""gnuplot scripts (SVG terminal) for the CSV artifacts.

Scripts are written next to their data and refer to it by file name, so run
them from that directory: ``gnuplot foo.gp`` produces ``foo.svg``.
"""

import csv
import json
from pathlib import Path

RANK_CUTOFF = 1e-10


def _header(stem, title):
    return [
        "set terminal svg size 720,540 dynamic",
        f"set output '{stem}.svg'",
        "set datafile separator ','",
        f"set title '{title}'",
    ]


def _convergence_script(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    axis = header[2]
    ranks = [h[len("relerr_r"):] for h in header if h.startswith("relerr_r")]
    pairs = sorted({(r[0], r[1]) for r in body}, key=lambda p: (float(p[0]), float(p[1])))
    first = next(
        ((float(r[2]), float(r[3])) for r in body if _is_number(r[3])), (1.0, 1.0)
    )
    x0, e0 = first
    lines = _header(path.stem, f"relative error vs {axis}")
    lines += [
        "set logscale xy",
        f"set xlabel '{axis}'",
        "set ylabel 'relerr'",
        "set key outside right",
        f"slope1(x) = {e0!r} * ({x0!r} / x)**1",
        f"slope2(x) = {e0!r} * ({x0!r} / x)**2",
    ]
    plots = []
    for a, b in pairs:
        for r in ranks:
            col = header.index(f"relerr_r{r}") + 1
            plots.append(
                f"'{path.name}' every ::1 using 3:(($1=={a} && $2=={b}) ? ${col} : 1/0) "
                f"with linespoints title '({a},{b}) r={r}'"
            )
    plots.append("slope1(x) with lines dashtype 2 title 'slope 1'")
    plots.append("slope2(x) with lines dashtype 3 title 'slope 2'")
    lines.append("plot " + ", \\\n     ".join(plots))
    return lines


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def _singular_value_script(path):
    lines = _header(path.stem, "singular values at t = T")
    lines += [
        "set logscale y",
        "set format y '10^{%L}'",
        "set xlabel 'index'",
        "set ylabel 'sigma'",
        f"plot '{path.name}' every ::1 using 1:2 with points pt 7 notitle",
    ]
    return lines


def _rank_trace(path):
    # numerical rank per step: count of sigma_i > RANK_CUTOFF * sigma_1
    out = path.with_name(path.stem.replace("_steps", "_rank_trace") + ".csv")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        sig_cols = [i for i, h in enumerate(header) if h.startswith("sigma_")]
        rows = []
        for rec in reader:
            sv = [float(rec[i]) for i in sig_cols]
            rank = sum(s > RANK_CUTOFF * sv[0] for s in sv) if sv and sv[0] > 0 else 0
            rows.append((rec[0], rec[1], rank))
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "t", "rank"])
        writer.writerows(rows)
    lines = _header(out.stem, f"numerical rank (cutoff {RANK_CUTOFF:g} sigma_1)")
    lines += [
        "set xlabel 't'",
        "set ylabel 'rank'",
        f"plot '{out.name}' every ::1 using 2:3 with steps notitle",
    ]
    return lines, out


def _heatmap_script(path):
    meta_path = path.with_name(path.name.replace("_magnitude.csv", "_meta.json"))
    meta = json.loads(meta_path.read_text())
    x_l, x_r, y_l, y_r = meta["domain"]
    h_x, h_y = meta["h"]
    lines = _header(path.stem, "|u| at t = T")
    lines += [
        f"set xrange [{x_l!r}:{x_r!r}]",
        f"set yrange [{y_l!r}:{y_r!r}]",
        "set xlabel 'x'",
        "set ylabel 'y'",
        "set size ratio -1",
        # matrix rows are x nodes, columns are y nodes
        f"plot '{path.name}' matrix using ({x_l!r} + ($2 + 1) * {h_x!r}):"
        f"({y_l!r} + ($1 + 1) * {h_y!r}):3 with image notitle",
    ]
    return lines, meta_path


def emit_plots(paths):
    """Write one ``.gp`` script per recognised artifact; return the script paths.

    Recognised: sweep tables (``*_temporal.csv``, ``*_spatial.csv``), final
    singular values, per-step singular values and magnitude grids.
    """
    paths = [Path(p) for p in paths]
    missing = [str(p) for p in paths if not p.exists()]
    for p in paths:
        if p.name.endswith("_magnitude.csv"):
            meta = p.with_name(p.name.replace("_magnitude.csv", "_meta.json"))
            if not meta.exists():
                missing.append(str(meta))
    if missing:
        raise FileNotFoundError("missing plot inputs: " + ", ".join(missing))
    scripts = []
    for p in paths:
        name = p.name
        if name.endswith(("_temporal.csv", "_spatial.csv")):
            lines = _convergence_script(p)
        elif name.endswith("_singular_values.csv"):
            lines = _singular_value_script(p)
        elif name.endswith("_steps.csv"):
            lines, _ = _rank_trace(p)
            name = name.replace("_steps", "_rank_trace")
        elif name.endswith("_magnitude.csv"):
            lines, _ = _heatmap_script(p)
        else:
            continue
        script = p.with_name(Path(name).stem + ".gp")
        script.write_text("\n".join(lines) + "\n")
        scripts.append(script)
    return scripts
