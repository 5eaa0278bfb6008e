"""Command-line interface: simulate, fit, tune, classical, coherence, bench.

File formats
------------
Series CSV: optional header row of channel names, then n rows of p numeric
columns.  Fit documents are JSON with sorted keys; loadings are stored as
``[re, im]`` pairs per channel per component, so a document re-read and
re-serialized is byte-identical.  Exit codes: 0 success, 2 usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .analysis import band_from_grid, band_power, bands_from_flags
from .bench import BenchReport, report_rows_as_dicts, run_grid
from .driver import LspcaFit, LspcaParams, classical_fdpca, lspca_fit
from .exceptions import NumericalError, UndefinedCoherenceError
from .simulate import SimScenario, lspca_process
from .spectral import SpectralEstimate, default_lag_order, fourier_grid, truncated_periodogram
from .tuning import CRITERIA, TuneConfig, iterative_tune

USAGE_ERROR = 2
NUMERICAL_ERROR = 3

MIN_SERIES_LENGTH = 64


def read_series_csv(path: str):
    """Load an (n, p) series; returns (array, channel names or None)."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    names = None
    start = 0
    try:
        [float(v) for v in rows[0]]
    except ValueError:
        names = [v.strip() for v in rows[0]]
        start = 1
    width = len(rows[start]) if start < len(rows) else 0
    data = []
    for i, row in enumerate(rows[start:], start=start + 1):
        if len(row) != width:
            raise ValueError(f"{path}: row {i} has {len(row)} fields, expected {width}")
        try:
            data.append([float(v) for v in row])
        except ValueError as exc:
            raise ValueError(f"{path}: row {i}: {exc}") from None
    if not data:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(data), names


def write_series_csv(path: str, x: np.ndarray, names=None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if names is None:
            names = [f"ch{j + 1:03d}" for j in range(x.shape[1])]
        writer.writerow(names)
        for row in x:
            writer.writerow([repr(float(v)) for v in row])


def dump_document(doc: dict) -> str:
    """Canonical JSON: sorted keys, no whitespace, shortest round-trip floats."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def fit_document(fit: LspcaFit, n: int, p: int, method: str,
                 taper: str = "none", center: bool = True, seed=None,
                 tuning_trace=None) -> dict:
    params = fit.params
    loadings = [
        [[[float(z.real), float(z.imag)] for z in fit.loadings[ell][row]]
         for row in range(p)]
        for ell in range(fit.n_freqs)
    ]
    frequencies = [
        {
            "ell": ell + 1,
            "omega": float(fit.grid[ell]),
            "h": float(fit.h[ell]),
            "beta": int(fit.beta[ell]),
            "eigenvalues": [float(v) for v in fit.eigenvalues[ell]],
            "loadings": loadings[ell],
        }
        for ell in range(fit.n_freqs)
    ]
    bands = [
        {"lo": b.lo, "hi": b.hi, "indices": [i + 1 for i in b.members]}
        for b in bands_from_flags(fit.grid, fit.beta)
    ]
    doc = {
        "metadata": {
            "n": int(n),
            "p": int(p),
            "d": int(params.d),
            "sparsity": int(params.sparsity),
            "theta": float(params.theta),
            "eta": int(fit.eta),
            "M": int(params.m_lags if params.m_lags is not None else default_lag_order(n)),
            "taper": taper,
            "center": bool(center),
            "seed": seed,
            "method": method,
            "version": __version__,
            "reinit_indices": [i + 1 for i in fit.reinit_indices],
        },
        "frequencies": frequencies,
        "bands": bands,
    }
    if tuning_trace is not None:
        doc["tuning_trace"] = tuning_trace
    return doc


def document_spectra(doc: dict) -> SpectralEstimate:
    """Rebuild the rank-d spectral reconstruction stored in a fit document."""
    meta = doc["metadata"]
    p = meta["p"]
    freqs = doc["frequencies"]
    grid = np.array([f["omega"] for f in freqs])
    mats = np.zeros((len(freqs), p, p), dtype=complex)
    for i, f in enumerate(freqs):
        u = np.array([[complex(re, im) for re, im in row] for row in f["loadings"]])
        lam = np.asarray(f["eigenvalues"], dtype=float)
        mats[i] = (u * lam) @ u.conj().T
        mats[i] = 0.5 * (mats[i] + mats[i].conj().T)
    return SpectralEstimate(grid=grid, matrices=mats, m_lags=meta["M"],
                            n_samples=meta["n"])


def document_beta(doc: dict) -> np.ndarray:
    return np.array([f["beta"] for f in doc["frequencies"]], dtype=int)


def write_loadings_csv(path: str, fit: LspcaFit) -> None:
    """Long-format loadings table: one row per (frequency, channel, component)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega", "channel", "component", "modulus", "re", "im"])
        for ell in range(fit.n_freqs):
            for row in range(fit.p):
                for j in range(fit.d):
                    z = fit.loadings[ell, row, j]
                    writer.writerow([repr(float(fit.grid[ell])), row + 1, j + 1,
                                     repr(float(abs(z))), repr(float(z.real)),
                                     repr(float(z.imag))])


def _parse_band(text: str):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise ValueError(f"band must look like lo:hi, got {text!r}") from None
    return lo, hi


def _parse_grid(text: str, integer: bool):
    """Grid syntax: comma list '1,2,3' or inclusive range 'lo:hi[:step]'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"range must be lo:hi or lo:hi:step, got {text!r}")
        if integer:
            lo, hi = int(parts[0]), int(parts[1])
            step = int(parts[2]) if len(parts) == 3 else 1
            return tuple(range(lo, hi + 1, step))
        lo, hi = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) == 3 else 0.1
        out = []
        v = lo
        while v <= hi + 1e-12:
            out.append(round(v, 12))
            v += step
        return tuple(out)
    cast = int if integer else float
    return tuple(cast(v) for v in text.split(","))


def _guard_length(x: np.ndarray) -> None:
    if x.shape[0] < MIN_SERIES_LENGTH:
        raise ValueError(
            f"series has {x.shape[0]} rows; need at least {MIN_SERIES_LENGTH}"
        )


def _cmd_simulate(args) -> int:
    sc = SimScenario(p=args.p, n=args.n, c=args.c, seed=args.seed)
    write_series_csv(args.out, lspca_process(sc))
    return 0


def _cmd_fit(args) -> int:
    x, _ = read_series_csv(args.input)
    _guard_length(x)
    n, p = x.shape
    m = args.M if args.M is not None else default_lag_order(n)
    center = not args.no_center
    spec = truncated_periodogram(x, m, center=center, taper=args.taper)
    params = LspcaParams(d=args.d, sparsity=args.sparsity, theta=args.theta,
                         eta=args.eta, m_lags=m)
    fit = lspca_fit(spec, params)
    doc = fit_document(fit, n=n, p=p, method="lspca", taper=args.taper, center=center)
    with open(args.out, "w") as fh:
        fh.write(dump_document(doc))
    if args.loadings_csv:
        write_loadings_csv(args.loadings_csv, fit)
    return 0


def _cmd_tune(args) -> int:
    x, _ = read_series_csv(args.input)
    _guard_length(x)
    n, p = x.shape
    cfg = TuneConfig(
        d=args.d,
        s_grid=_parse_grid(args.s_grid, integer=True),
        theta_grid=_parse_grid(args.theta_grid, integer=False),
        k=args.k,
        criterion=args.criterion,
        iterations=args.iterations,
        m_lags=args.M,
        center=not args.no_center,
        taper=args.taper,
    )
    tuned = iterative_tune(x, cfg)
    params = tuned.params
    spec = truncated_periodogram(x, params.m_lags, center=cfg.center, taper=cfg.taper)
    fit = lspca_fit(spec, params)
    doc = fit_document(fit, n=n, p=p, method="lspca", taper=cfg.taper,
                       center=cfg.center, tuning_trace=tuned.trace)
    with open(args.out, "w") as fh:
        fh.write(dump_document(doc))
    if args.loadings_csv:
        write_loadings_csv(args.loadings_csv, fit)
    return 0


def _cmd_classical(args) -> int:
    x, _ = read_series_csv(args.input)
    _guard_length(x)
    n, p = x.shape
    m = args.M if args.M is not None else default_lag_order(n)
    spec = truncated_periodogram(x, m)
    fit = classical_fdpca(spec, args.d)
    doc = fit_document(fit, n=n, p=p, method="classical")
    with open(args.out, "w") as fh:
        fh.write(dump_document(doc))
    if args.loadings_csv:
        write_loadings_csv(args.loadings_csv, fit)
    return 0


def _cmd_coherence(args) -> int:
    with open(args.fit) as fh:
        doc = json.load(fh)
    lo, hi = _parse_band(args.band)
    fhat = document_spectra(doc)
    band = band_from_grid(fhat.grid, lo, hi, beta=document_beta(doc))
    if not band.members:
        raise ValueError(f"no retained grid frequencies inside [{lo}, {hi}]")
    power = band_power(fhat, band)
    active = np.flatnonzero(power > 1e-12)
    skipped = fhat.p - active.size
    if skipped:
        print(f"skipping {skipped} channels with no band power", file=sys.stderr)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["band_lo", "band_hi", "k", "l", "re", "im", "modulus"])
        for a_pos, k in enumerate(active):
            for ell in active[a_pos:]:
                total_kl = fhat.matrices[np.asarray(band.members)].sum(axis=0)[k, ell]
                coh = total_kl / np.sqrt(power[k] * power[ell])
                writer.writerow([repr(lo), repr(hi), int(k) + 1, int(ell) + 1,
                                 repr(float(coh.real)), repr(float(coh.imag)),
                                 repr(float(abs(coh)))])
    return 0


def _load_bench_scenarios(path: str):
    with open(path) as fh:
        doc = json.load(fh)
    pairs = []
    for entry in doc["scenarios"]:
        sc = SimScenario(p=int(entry["p"]), n=int(entry["n"]),
                         c=float(entry.get("c", 1.0)))
        if "params" in entry:
            raw = entry["params"]
            setting = LspcaParams(
                d=int(raw["d"]),
                sparsity=int(raw["sparsity"]),
                theta=float(raw.get("theta", 0.0)),
                eta=int(raw["eta"]) if raw.get("eta") is not None else None,
                m_lags=int(raw["M"]) if raw.get("M") is not None else None,
            )
        elif "tune" in entry:
            raw = entry["tune"]
            setting = TuneConfig(
                d=int(raw["d"]),
                s_grid=tuple(raw["s_grid"]),
                theta_grid=tuple(raw["theta_grid"]),
                k=int(raw.get("k", 4)),
                criterion=raw.get("criterion", "aic"),
                iterations=int(raw.get("iterations", 2)),
                m_lags=int(raw["M"]) if raw.get("M") is not None else None,
            )
        else:
            raise ValueError("each scenario needs a 'params' or 'tune' block")
        pairs.append((sc, setting))
    return pairs


def _cmd_bench(args) -> int:
    pairs = _load_bench_scenarios(args.scenario)
    report = run_grid(pairs, replicates=args.replicates, seed=args.seed)
    rows = report_rows_as_dicts(report)
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    summary_path = args.summary or (args.out.rsplit(".", 1)[0] + ".summary.json")
    with open(summary_path, "w") as fh:
        fh.write(dump_document({"aggregates": report.aggregates,
                                "failures": report.failures}))
    print(f"{len(rows)} replicates, {report.failures} failures", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lspca",
        description="Sparse, frequency-localized principal subspaces of "
                    "multivariate time series",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate the benchmark process")
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--c", type=float, default=1.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=_cmd_simulate)

    fit = sub.add_parser("fit", help="fit sparse localized principal subspaces")
    fit.add_argument("--input", required=True)
    fit.add_argument("--d", type=int, required=True)
    fit.add_argument("--sparsity", type=int, required=True)
    fit.add_argument("--theta", type=float, default=0.0)
    fit.add_argument("--eta", type=int, default=None)
    fit.add_argument("--M", type=int, default=None)
    fit.add_argument("--taper", choices=["none", "bartlett"], default="none")
    fit.add_argument("--no-center", action="store_true")
    fit.add_argument("--loadings-csv", default=None)
    fit.add_argument("--out", required=True)
    fit.set_defaults(func=_cmd_fit)

    tune = sub.add_parser("tune", help="select parameters, then fit")
    tune.add_argument("--input", required=True)
    tune.add_argument("--d", type=int, required=True)
    tune.add_argument("--k", type=int, default=4)
    tune.add_argument("--criterion", choices=list(CRITERIA), default="bic")
    tune.add_argument("--s-grid", default="1:16")
    tune.add_argument("--theta-grid", default="0,0.3,0.6")
    tune.add_argument("--iterations", type=int, default=2)
    tune.add_argument("--M", type=int, default=None)
    tune.add_argument("--taper", choices=["none", "bartlett"], default="none")
    tune.add_argument("--no-center", action="store_true")
    tune.add_argument("--loadings-csv", default=None)
    tune.add_argument("--out", required=True)
    tune.set_defaults(func=_cmd_tune)

    classical = sub.add_parser("classical", help="dense per-frequency baseline")
    classical.add_argument("--input", required=True)
    classical.add_argument("--d", type=int, required=True)
    classical.add_argument("--M", type=int, default=None)
    classical.add_argument("--loadings-csv", default=None)
    classical.add_argument("--out", required=True)
    classical.set_defaults(func=_cmd_classical)

    coh = sub.add_parser("coherence", help="band coherence from a fit document")
    coh.add_argument("--fit", required=True)
    coh.add_argument("--band", required=True, help="lo:hi in cycles/sample")
    coh.add_argument("--out", required=True)
    coh.set_defaults(func=_cmd_coherence)

    bench = sub.add_parser("bench", help="replicate error-comparison harness")
    bench.add_argument("--scenario", required=True, help="JSON scenario file")
    bench.add_argument("--replicates", type=int, default=20)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--summary", default=None)
    bench.add_argument("--out", required=True)
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (NumericalError, UndefinedCoherenceError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
