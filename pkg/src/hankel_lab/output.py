"""Result files: CSV tables, JSON summaries, a gnuplot script and PNG figures.

Every float is written with 17 significant digits, lines end in LF and each
file goes to a temporary name first and is renamed into place, so a failed
run never leaves a partial file behind.
"""

from __future__ import annotations

import io
import json
import math
import os

import numpy as np

from .operators.dump import _atomic_write

CSV_HEADER = "alpha,N,measured,predicted,gate_margin"


def fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def to_json(obj, indent=2, _level=0):
    """JSON with sorted keys and ``%.17g`` floats (NaN and infinities become null)."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool) or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return "null" if not math.isfinite(x) else f"{x:.17g}"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted((str(k), v) for k, v in obj.items())
        body = ",\n".join(f"{pad}{json.dumps(k)}: {to_json(v, indent, _level + 1)}"
                          for k, v in items)
        return "{\n" + body + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        body = ",\n".join(pad + to_json(v, indent, _level + 1) for v in obj)
        return "[\n" + body + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_text(path, text):
    _atomic_write(path, text.encode("utf-8"))


def records_csv(records):
    lines = [CSV_HEADER]
    for r in sorted(records, key=lambda r: r.alpha):
        lines.append(",".join([fmt(r.alpha), str(int(r.N)), fmt(r.measured), fmt(r.predicted),
                               fmt(r.gate_margin)]))
    return "\n".join(lines) + "\n"


def _record_dict(r):
    out = {"alpha": r.alpha, "N": r.N, "measured": r.measured, "predicted": r.predicted,
           "gate_margin": r.gate_margin, "accepted": r.accepted}
    if r.note:
        out["note"] = r.note
    return out


def summary_dict(result, config_echo=None, deterministic=False):
    out = {"experiment": result.experiment, "dimension": result.dimension,
           "verdict": result.verdict, "checks": [c.as_dict() for c in result.checks],
           "records": len(result.records),
           "rejected": [_record_dict(r) for r in result.rejected]}
    if result.fit is not None:
        out["fit"] = result.fit.as_dict()
        for key in ("A", "D"):
            if key in result.predicted:
                out[f"predicted_{key}"] = result.predicted[key]
                err = result.relative_error(key)
                if err is not None:
                    out["relative_error" if key == "A" else f"relative_error_{key}"] = err
        out["hypotheses_ok"] = result.predicted.get("hypotheses_ok")
    if result.series:
        out["slopes"] = {fmt(k): v for k, v in result.predicted.get("slopes", {}).items()}
        out["norms"] = {fmt(k): v for k, v in result.predicted.get("norms", {}).items()}
    if config_echo is not None:
        out["config"] = config_echo
    if not deterministic:
        out["runtime_seconds"] = result.runtime
    return out


def _series_name(lam):
    return f"sweep_lambda_{fmt(lam)}.csv"


def plot_script(result):
    """A gnuplot script that draws the CSV tables next to it."""
    lines = ["# gnuplot script; run `gnuplot plot.gp` in this directory",
             "set datafile separator ','",
             "set key autotitle columnhead",
             "set logscale x",
             "set terminal pngcairo size 800,600",
             "set output 'sweep_gnuplot.png'"]
    if result.series:
        lines.append("set xlabel 'b'")
        lines.append("set ylabel 'eigenvalues above threshold'")
        parts = [f"'{_series_name(lam)}' using 1:3 with linespoints title 'lambda = {fmt(lam)}'"
                 for lam in sorted(result.series)]
        lines.append("plot " + ", \\\n     ".join(parts))
    else:
        lines.append("set xlabel 'alpha'")
        lines.append(f"set ylabel '{result.experiment}'")
        lines.append("plot 'sweep.csv' using 1:3 with points pt 7 title 'measured', \\\n"
                     "     'sweep.csv' using 1:4 with lines title 'leading law'")
    return "\n".join(lines) + "\n"


def _png_bytes(fig):
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=100, metadata={"Software": None})
    return buf.getvalue()


def render_sweep_png(result):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 5))
    if result.series:
        for lam in sorted(result.series):
            recs = result.series[lam]
            ax.plot([r.alpha for r in recs], [r.measured for r in recs], "o-",
                    label=f"lambda = {lam:g}")
        ax.set_xlabel("b")
        ax.set_ylabel("eigenvalues above threshold")
    else:
        al = np.array([r.alpha for r in result.records])
        ax.plot(al, [r.measured for r in result.records], "o", label="measured")
        if result.fit is not None:
            grid = np.geomspace(al.min(), al.max(), 200)
            ax.plot(grid, result.fit.predict(grid, result.dimension), "-", label="fit")
        ax.plot(al, [r.predicted for r in result.records], "--", label="leading law")
        ax.set_xlabel("alpha")
        ax.set_ylabel(result.experiment)
    ax.set_xscale("log")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    data = _png_bytes(fig)
    plt.close(fig)
    return data


def write_outputs(result, out_dir, config_echo=None, deterministic=False, plot=True):
    """Write ``sweep.csv`` (or one CSV per threshold), ``summary.json``, ``plot.gp``
    and optionally ``sweep.png``. Returns the list of paths written."""
    os.makedirs(out_dir, exist_ok=True)
    files = {}
    if result.series:
        for lam, recs in sorted(result.series.items()):
            files[_series_name(lam)] = records_csv(recs).encode()
    elif result.records:
        files["sweep.csv"] = records_csv(result.records).encode()
    else:
        stale = os.path.join(out_dir, "sweep.csv")
        if os.path.exists(stale):
            os.unlink(stale)
    summary = summary_dict(result, config_echo, deterministic)
    files["summary.json"] = (to_json(summary) + "\n").encode()
    if result.records or result.series:
        files["plot.gp"] = plot_script(result).encode()
        if plot:
            files["sweep.png"] = render_sweep_png(result)
    written = []
    for name, data in files.items():
        path = os.path.join(out_dir, name)
        _atomic_write(path, data)
        written.append(path)
    return written


def write_report(report, out_dir, config_echo=None, deterministic=False, plot=True):
    """Suite reports: ``summary.json`` plus, for sequences, ``growth.csv`` and ``growth.png``."""
    os.makedirs(out_dir, exist_ok=True)
    summary = {"suite": report.suite, "verdict": report.verdict,
               "checks": [c.as_dict() for c in report.checks]}
    if report.sequences:
        summary["sequences"] = report.sequences
    if config_echo is not None:
        summary["config"] = config_echo
    if not deterministic:
        summary["runtime_seconds"] = report.runtime
    files = {"summary.json": (to_json(summary) + "\n").encode()}
    if report.sequences:
        keys = [k for k in report.sequences if k != "alpha"]
        lines = [",".join(["alpha"] + keys)]
        for i, al in enumerate(report.sequences["alpha"]):
            lines.append(",".join([fmt(al)] + [fmt(report.sequences[k][i]) for k in keys]))
        files["growth.csv"] = ("\n".join(lines) + "\n").encode()
        if plot:
            files["growth.png"] = _growth_png(report.sequences, keys)
    written = []
    for name, data in files.items():
        path = os.path.join(out_dir, name)
        _atomic_write(path, data)
        written.append(path)
    return written


def _growth_png(seq, keys):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 5))
    for k in keys:
        ax.plot(seq["alpha"], seq[k], "o-", label=k)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("alpha")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    data = _png_bytes(fig)
    plt.close(fig)
    return data


def spectrum_report(out_dir, values, kind, alpha, N):
    """``spectrum.txt`` (one value per line) and a small ``spectrum.json`` header."""
    from .operators.dump import spectrum_text

    os.makedirs(out_dir, exist_ok=True)
    txt = os.path.join(out_dir, "spectrum.txt")
    meta = os.path.join(out_dir, "spectrum.json")
    _atomic_write(txt, spectrum_text(np.sort(values)).encode("ascii"))
    info = {"kind": kind, "alpha": alpha, "N": N, "count": len(values)}
    _atomic_write(meta, (to_json(info) + "\n").encode())
    return [txt, meta]
