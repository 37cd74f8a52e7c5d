"""CSV and SVG emission for sweep results."""
import csv
import io
from pathlib import Path

import numpy as np

from .scenario import SWEEP_COLUMNS, SweepRow

_BOOL_COLUMNS = {"compliant_pd", "compliant_sar", "far_field_valid"}
_INT_COLUMNS = {"serving_site"}
LOG_COLUMNS = {"s_i_w_m2", "sar_w_kg"}

AXIS_LABELS = {
    "p_r_dbm": "Received power (dBm)",
    "snr_db": "SNR (dB)",
    "rate_bps": "Data rate (bit/s)",
    "s_i_w_m2": "Power density (W/m$^2$)",
    "sar_w_kg": "SAR (W/kg)",
    "path_loss_db": "Path loss (dB)",
}


def _fmt(name, value):
    if name in _BOOL_COLUMNS:
        return "true" if value else "false"
    if name in _INT_COLUMNS:
        return str(int(value))
    return repr(float(value))


def _parse(name, text):
    if name in _BOOL_COLUMNS:
        if text not in ("true", "false"):
            raise ValueError(f"{name}: expected true/false, got {text!r}")
        return text == "true"
    if name in _INT_COLUMNS:
        return int(text)
    return float(text)


def format_csv(rows, metadata=None):
    buf = io.StringIO(newline="")
    if metadata:
        for key, value in metadata.items():
            buf.write(f"# {key}: {value}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(name, getattr(row, name)) for name in SWEEP_COLUMNS])
    return buf.getvalue()


def emit_csv(rows, path, metadata=None):
    """Write rows as RFC 4180 CSV; ``metadata`` becomes leading ``#`` comment lines."""
    if not rows:
        raise ValueError("no rows to write")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_csv(rows, metadata))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path):
    """Parse a CSV written by :func:`emit_csv`; returns ``(rows, metadata)``."""
    metadata = {}
    lines = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                metadata[key] = value
            else:
                lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    if tuple(header) != SWEEP_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    rows = [SweepRow(**{name: _parse(name, text) for name, text in zip(header, rec)})
            for rec in reader if rec]
    return rows, metadata


def emit_plot(rows, columns, path, logy=None, title=None, metadata=None, series=None):
    """Self-contained SVG plot of ``columns`` against ``x_m``.

    ``series`` optionally maps a legend label to another row list drawn on the
    same axes.  ``logy`` defaults to log scale for power density and SAR.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not rows:
        raise ValueError("no rows to plot")
    columns = [columns] if isinstance(columns, str) else list(columns)
    datasets = {"": rows} if series is None else dict(series)
    with matplotlib.rc_context({"svg.fonttype": "path", "svg.hashsalt": "rfexposure",
                                "font.family": "DejaVu Sans"}):
        fig, axes = plt.subplots(len(columns), 1, figsize=(7.0, 3.2 * len(columns)),
                                 squeeze=False)
        for ax, col in zip(axes[:, 0], columns):
            for label, data in datasets.items():
                x = np.array([r.x_m for r in data])
                y = np.array([getattr(r, col) for r in data], dtype=float)
                ax.plot(x, y, lw=1.2, label=label or None)
            use_log = (col in LOG_COLUMNS) if logy is None else logy
            if use_log:
                ax.set_yscale("log")
            ax.set_ylabel(AXIS_LABELS.get(col, col))
            ax.grid(color="gray", alpha=0.5, lw=0.5)
            if series is not None:
                ax.legend(fontsize=8)
        axes[-1, 0].set_xlabel("UE location (m)")
        if title:
            axes[0, 0].set_title(title)
        fig.tight_layout()
        svg_meta = {"Date": None, "Creator": "rfexposure"}
        if title:
            svg_meta["Title"] = title
        if metadata:
            svg_meta["Description"] = "; ".join(f"{k}={v}" for k, v in metadata.items())
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata=svg_meta)
        plt.close(fig)
    return path
