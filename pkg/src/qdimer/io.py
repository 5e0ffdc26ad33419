"""Text file formats for histograms, fixed points, phase grids and
ensemble summaries.

All writers are deterministic: fixed key order, fixed row order and %.17g
float formatting (round-trip exact for doubles), so identical inputs produce
byte-identical files.
"""

import numpy as np

from .errors import ParseError
from .exact import EnsembleStats
from .flow import PhaseDiagram
from .observables import Histogram2D

#: required histogram header keys, in file order
HISTOGRAM_KEYS = ("backend", "omega_s", "gamma1", "gamma2", "dt", "t_final",
                  "n_traj", "master_seed", "n_bins")

_INT_KEYS = {"n_traj", "master_seed", "n_bins", "n_dropped", "grid_n", "scan_n"}


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _header_lines(meta, key_order):
    ordered = [k for k in key_order if k in meta]
    extras = sorted(k for k in meta if k not in key_order)
    return [f"# {k}={_fmt(meta[k])}" for k in ordered + extras]


def write_histogram(path, h: Histogram2D) -> None:
    """Histogram CSV: '# key=value' header, then row-major
    'i,j,theta_l_center,theta_r_center,count,density' records."""
    meta = dict(h.meta)
    meta["n_bins"] = h.n
    dens = h.density_matrix()
    centers = h.centers
    lines = _header_lines(meta, HISTOGRAM_KEYS)
    for i in range(h.n):
        for j in range(h.n):
            lines.append(
                f"{i},{j},{_fmt(float(centers[i]))},{_fmt(float(centers[j]))},"
                f"{int(h.counts[i, j])},{_fmt(float(dens[i, j]))}"
            )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_header_line(line, lineno, meta):
    body = line[1:].strip()
    if "=" not in body:
        raise ParseError(f"header line without '=': {body!r}", line=lineno)
    key, _, value = body.partition("=")
    key = key.strip()
    if not key:
        raise ParseError(f"header line with empty key: {body!r}", line=lineno)
    value = value.strip()
    if key in _INT_KEYS:
        try:
            meta[key] = int(value)
        except ValueError:
            raise ParseError(f"invalid integer for key '{key}': {value!r}",
                             line=lineno) from None
    else:
        try:
            meta[key] = float(value)
        except ValueError:
            meta[key] = value


def read_histogram(path) -> Histogram2D:
    """Parse a histogram CSV back into :class:`Histogram2D`.

    Counts and metadata round-trip bit-exactly; grid-solver files (all
    counts zero) come back with their stored density.
    """
    meta = {}
    counts = None
    density = None
    n = None
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                _parse_header_line(line, lineno, meta)
                continue
            if counts is None:
                if "n_bins" not in meta:
                    raise ParseError("missing required header key 'n_bins'",
                                     line=lineno)
                n = int(meta["n_bins"])
                counts = np.zeros((n, n), dtype=np.int64)
                density = np.zeros((n, n))
            parts = line.split(",")
            if len(parts) != 6:
                raise ParseError(f"expected 6 fields, got {len(parts)}", line=lineno)
            try:
                i, j = int(parts[0]), int(parts[1])
                c = int(parts[4])
                d = float(parts[5])
            except ValueError as exc:
                raise ParseError(f"bad numeric field: {exc}", line=lineno) from None
            if not (0 <= i < n and 0 <= j < n):
                raise ParseError(f"bin index ({i},{j}) out of range for n={n}",
                                 line=lineno)
            counts[i, j] = c
            density[i, j] = d
    if counts is None:
        raise ParseError("file contains no histogram rows")
    for key in ("backend", "n_bins"):
        if key not in meta:
            raise ParseError(f"missing required header key '{key}'")
    n_bins = int(meta.pop("n_bins"))
    total = int(counts.sum())
    return Histogram2D(n=n_bins, counts=counts, total=total, meta=meta,
                       density=density if total == 0 else None)


def write_fixed_points(path, fps, lambda1, lambda2, omega_s=1.0) -> None:
    """One record per point: theta_l,theta_r,eig1_re,eig1_im,eig2_re,eig2_im,class."""
    lines = [f"# lambda1={_fmt(float(lambda1))}",
             f"# lambda2={_fmt(float(lambda2))}",
             f"# omega_s={_fmt(float(omega_s))}",
             f"# n_fixed={len(fps)}"]
    for fp in fps:
        lines.append(
            f"{_fmt(fp.theta_l)},{_fmt(fp.theta_r)},"
            f"{_fmt(fp.eig1.real)},{_fmt(fp.eig1.imag)},"
            f"{_fmt(fp.eig2.real)},{_fmt(fp.eig2.imag)},{fp.stability.value}"
        )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_phase_grid(path, diagram: PhaseDiagram) -> None:
    """Rows 'lambda1,lambda2,n_fixed,n_stable,phase' over the grid."""
    lines = [f"# n_lambda1={diagram.lambda1s.size}",
             f"# n_lambda2={diagram.lambda2s.size}"]
    for i, l1 in enumerate(diagram.lambda1s):
        for j, l2 in enumerate(diagram.lambda2s):
            lines.append(
                f"{_fmt(float(l1))},{_fmt(float(l2))},"
                f"{int(diagram.n_fixed[i, j])},{int(diagram.n_stable[i, j])},"
                f"{diagram.labels[i, j]}"
            )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_ensemble_summary(path, stats: EnsembleStats, meta=None) -> None:
    """Structured text with the fidelity/entropy averages, their standard
    errors, the excluded-sample count and the readout totals."""
    lines = _header_lines(dict(meta or {}), HISTOGRAM_KEYS)
    lines += [
        f"f_mean={_fmt(stats.f_mean)}",
        f"f_se={_fmt(stats.f_se)}",
        f"s_mean={_fmt(stats.s_mean)}",
        f"s_se={_fmt(stats.s_se)}",
        f"n_samples={stats.n_samples}",
        f"n_excluded={stats.n_excluded}",
        f"readout_r0={stats.readout_totals[0]}",
        f"readout_r1={stats.readout_totals[1]}",
        f"readout_r2={stats.readout_totals[2]}",
        f"readout_r3={stats.readout_totals[3]}",
    ]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_flow_field(path, centers, v_l, v_r, lambda1, lambda2, omega_s=1.0) -> None:
    """Flow-field CSV: 'i,j,theta_l_center,theta_r_center,v_l,v_r' rows."""
    n = len(centers)
    lines = [f"# lambda1={_fmt(float(lambda1))}",
             f"# lambda2={_fmt(float(lambda2))}",
             f"# omega_s={_fmt(float(omega_s))}",
             f"# grid_n={n}"]
    for i in range(n):
        for j in range(n):
            lines.append(
                f"{i},{j},{_fmt(float(centers[i]))},{_fmt(float(centers[j]))},"
                f"{_fmt(float(v_l[i, j]))},{_fmt(float(v_r[i, j]))}"
            )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
