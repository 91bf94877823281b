"""Command-line front end.

    nlspectra list-scenarios
    nlspectra delta-well --Omega 1 --epsilon 1
    nlspectra spectrum fig3b --out runs/
    nlspectra macrostate --kind soliton --E -0.5 --epsilon -1 --scan=1e-3,-1e-3
    nlspectra evolve fig9a fig9b fig9c --threads 3 --out runs/

Exit codes: 0 ok, 2 config error, 3 empty result, 4 numerical failure.
Data files hold no timestamps; the clock lives in the manifest.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from importlib import metadata
from pathlib import Path

import numpy as np

from . import scenarios as sc
from .field import FixedPointDiverged, Inconclusive, evolve, scattering_report
from .macrostate import (NoLoop, PreconditionViolated, classify_perturbation, gausson,
                         hamiltonian_jump_estimate, rising_cue_start, soliton)
from .model import Bump, ModelError
from .spectral import DomainError, NoSolution, SpectralError, branch_map, delta_well_norm1, isonorm_eigenvalues

EXIT_OK, EXIT_CONFIG, EXIT_EMPTY, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("nlspectra")


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def code_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _num(v) -> str:
    """Shortest round-trip text for a float ('.' decimal, locale independent)."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(v) if not isinstance(v, str) else v for v in row])


def write_manifest(out: Path, stem: str, command: str, config: dict, outputs: list[str], t0: float,
                   report: dict | None = None) -> Path:
    manifest = {
        "command": command,
        "config": config,
        "seed_independent": True,
        "code_version": code_version(),
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "outputs": outputs,
    }
    if report is not None:
        manifest["report"] = report
    path = out / f"{stem}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
    return path


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not serialisable: {type(o)}")


def _load_config(args, name: str | None) -> dict:
    cfg: dict = {}
    if name:
        cfg = sc.get_scenario(name)
    if getattr(args, "config", None):
        try:
            user = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CLIError(EXIT_CONFIG, f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(user, dict):
            raise CLIError(EXIT_CONFIG, "config must be a JSON object")
        cfg = sc.merge(cfg, user)
    return cfg


def _out_dir(args) -> Path:
    out = Path(getattr(args, "out", None) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _say(args, msg: str) -> None:
    if not getattr(args, "quiet", False):
        print(msg)


# --------------------------------------------------------------------------
# delta-well


def cmd_delta_well(args) -> int:
    eps_eff = args.epsilon * args.norm
    try:
        E = delta_well_norm1(args.Omega, eps_eff)
    except NoSolution:
        bound = "2Ω" if args.Omega >= 0 else "4Ω"
        print(f"no localization: ε > {bound}")
        return EXIT_EMPTY
    # E depends on epsilon and N only through their product
    print(f"E = {E!r}")
    return EXIT_OK


# --------------------------------------------------------------------------
# spectrum


def _isonorm_job(job):
    N, nl, V, qs, E_range, n_max, shoot, a, b, bmap = job
    return N, isonorm_eigenvalues(N, nl, V, qs, E_range, n_max, shoot, a, b, bmap=bmap)


def cmd_spectrum(args) -> int:
    t0 = time.perf_counter()
    cfg = _load_config(args, args.name)
    if not cfg:
        raise CLIError(EXIT_CONFIG, "spectrum needs a scenario name or --config")
    try:
        nl, V, qs, E_range, n_max, targets, shoot, window = sc.build_spectrum(cfg)
    except sc.ConfigError as exc:
        raise CLIError(EXIT_CONFIG, str(exc)) from exc
    a, b = (window or (None, None))
    try:
        bmap = branch_map(qs, nl, V, E_range, n_max, shoot, a, b)
    except SpectralError as exc:
        raise CLIError(EXIT_CONFIG, str(exc)) from exc
    out = _out_dir(args)
    stem = args.name or cfg.get("name", "spectrum")
    rows = [(p.q_a, p.n, p.E, p.pseudonorm, p.norm_valid) for row in bmap.points for p in row]
    branches = out / f"{stem}_branches.csv"
    write_csv(branches, ["q_a", "n", "E", "pseudonorm", "norm_valid"], rows)
    outputs = [branches.name]

    iso_rows = []
    if targets:
        jobs = [(N, nl, V, qs, E_range, n_max, shoot, a, b, bmap) for N in targets]
        results = _map(_isonorm_job, jobs, args.threads)
        for N, pts in results:
            iso_rows += [(N, p.n, p.E, p.q_a) for p in pts]
        iso = out / f"{stem}_isonorm.csv"
        write_csv(iso, ["N", "n", "E", "q_a"], iso_rows)
        outputs.append(iso.name)
    write_manifest(out, stem, "spectrum", cfg, outputs, t0)
    _say(args, f"{len(rows)} branch points, {len(iso_rows)} isonorm eigenvalues -> {out}")
    for N, n, E, q in iso_rows:
        _say(args, f"N = {N!r}  n = {n}  E = {E:.6f}  (q_a = {q:.6g})")
    return EXIT_OK if rows else EXIT_EMPTY


# --------------------------------------------------------------------------
# macrostate


def cmd_macrostate(args) -> int:
    t0 = time.perf_counter()
    try:
        prof = (soliton if args.kind == "soliton" else gausson)(args.E, args.epsilon)
    except DomainError as exc:
        raise CLIError(EXIT_CONFIG, str(exc)) from exc
    out = _out_dir(args)
    stem = args.stem or f"macrostate_{args.kind}"
    x = np.linspace(-args.half_width, args.half_width, args.points)
    path = out / f"{stem}_profile.csv"
    write_csv(path, ["x", "psi"], zip(x, prof(x)))
    outputs = [path.name]
    config = {"kind": args.kind, "E": args.E, "epsilon": args.epsilon, "half_width": args.half_width,
              "points": args.points}
    _say(args, f"{args.kind} E={args.E!r} eps={args.epsilon!r}: max psi = {prof.amplitude:.12g}, norm = {prof.norm:.12g}")

    if args.scan:
        nl = prof.nonlinearity
        center, width, start_t = args.pulse_center, args.pulse_width, args.pulse_center - 4.0
        config.update(scan=list(args.scan), pulse_center=center, pulse_width=width)
        try:
            start = rising_cue_start(args.E, nl, float(prof(start_t)), start_t)
            rows = []
            for lam in args.scan:
                pulse = Bump(lam, center, width)
                res = classify_perturbation(args.E, nl, pulse, start)
                jump = hamiltonian_jump_estimate(args.E, nl, pulse, start)
                rows.append((lam, res.verdict.value, res.H0_after, jump))
                _say(args, f"lambda = {lam!r}: {res.verdict.value} (H0 = {res.H0_after:.6e})")
        except (PreconditionViolated, NoLoop) as exc:
            raise CLIError(EXIT_CONFIG, str(exc)) from exc
        vpath = out / f"{stem}_verdicts.csv"
        write_csv(vpath, ["lambda", "verdict", "H0_after", "jump_estimate"], rows)
        outputs.append(vpath.name)
    write_manifest(out, stem, "macrostate", config, outputs, t0)
    return EXIT_OK


# --------------------------------------------------------------------------
# evolve


def _fmt_iv(iv) -> str:
    lo, hi = iv
    return f"n[{'-inf' if math.isinf(lo) else _num(lo)},{'inf' if math.isinf(hi) else _num(hi)}]"


def run_evolution(stem: str, cfg: dict, out: Path) -> dict:
    """Run one evolve config and write its three files; returns the report."""
    t0 = time.perf_counter()
    psi0, nl, V, ecfg = sc.build_evolution(cfg)
    snaps: list = []
    state, diag = evolve(psi0, nl, V, ecfg, snapshots=snaps if ecfg.snapshot_every else None)
    if not ecfg.snapshot_every or snaps[-1].t != state.t:
        snaps.append(state)

    snap_path = out / f"{stem}_snapshots.csv"
    with open(snap_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "rho", "Q", "P"])
        for s in snaps:
            for xi, q, p in zip(s.x, s.Q, s.P):
                w.writerow([_num(s.t), _num(xi), _num(q * q + p * p), _num(q), _num(p)])

    ivs = list(diag.partial_norms)
    diag_path = out / f"{stem}_diagnostics.csv"
    write_csv(diag_path, ["t", "N"] + [_fmt_iv(iv) for iv in ivs] + ["H", "E", "centroid"],
              zip(diag.times, diag.norm, *[diag.partial_norms[iv] for iv in ivs], diag.H, diag.E_func,
                  diag.centroid))

    report = {"t_end": float(state.t), "N_initial": float(diag.norm[0]), "N_final": float(diag.norm[-1]),
              "centroid_final": float(diag.centroid[-1])}
    kind = cfg.get("report", "none")
    if kind == "scattering":
        try:
            report["scattering"] = asdict(scattering_report(diag, V))
        except Inconclusive as exc:
            report["scattering"] = {"inconclusive": str(exc)}
    elif kind in ("split", "centroid"):
        report["partial_norms_final"] = {_fmt_iv(iv): float(diag.partial_norms[iv][-1]) for iv in ivs}
    write_manifest(out, stem, "evolve", cfg, [snap_path.name, diag_path.name], t0, report)
    return report


def _evolve_job(job):
    stem, cfg, out = job
    try:
        return stem, run_evolution(stem, cfg, Path(out)), None
    except FixedPointDiverged as exc:
        return stem, None, (EXIT_NUMERIC, f"{stem}: {exc}")
    except (sc.ConfigError, ModelError) as exc:
        return stem, None, (EXIT_CONFIG, f"{stem}: {exc}")


def cmd_evolve(args) -> int:
    names = args.names or [None]
    jobs = []
    for name in names:
        cfg = _load_config(args, name)
        if not cfg:
            raise CLIError(EXIT_CONFIG, "evolve needs a scenario name or --config")
        if args.t_end is not None:
            cfg = sc.merge(cfg, {"evolution": {"t_end": args.t_end}})
        stem = name or cfg.get("name", "evolve")
        jobs.append((stem, cfg, str(_out_dir(args))))
    worst = EXIT_OK
    for stem, report, err in _map(_evolve_job, jobs, args.threads):
        if err is not None:
            print(err[1], file=sys.stderr)
            worst = max(worst, err[0])
            continue
        _say(args, f"{stem}: {json.dumps(report, sort_keys=True)}")
    return worst


# --------------------------------------------------------------------------


def cmd_list(args) -> int:
    for name, kind, desc in sc.list_scenarios():
        print(f"{name:12s} {kind:9s} {desc}")
    return EXIT_OK


def _map(fn, jobs, threads):
    """Ordered map, in worker processes when ``threads`` > 1."""
    threads = threads or 1
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as ex:
        return list(ex.map(fn, jobs))


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS, help="JSON config (overrides scenario fields)")
    common.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS, help="output directory (default: .)")
    common.add_argument("--threads", type=int, metavar="N", default=argparse.SUPPRESS, help="worker processes")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="nlspectra", description=__doc__.split("\n\n")[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", parents=[common], help="branch map and isonorm eigenvalues")
    s.add_argument("name", nargs="?", help="built-in scenario (see list-scenarios)")
    s.set_defaults(func=cmd_spectrum)

    d = sub.add_parser("delta-well", parents=[common], help="closed-form delta-well eigenvalue")
    d.add_argument("--Omega", type=float, required=True)
    d.add_argument("--epsilon", type=float, required=True)
    d.add_argument("--norm", type=float, default=1.0)
    d.set_defaults(func=cmd_delta_well)

    m = sub.add_parser("macrostate", parents=[common], help="closed-form profile and pulse verdicts")
    m.add_argument("--kind", choices=["soliton", "gausson"], required=True)
    m.add_argument("--E", type=float, required=True)
    m.add_argument("--epsilon", type=float, required=True)
    m.add_argument("--half-width", type=float, default=8.0)
    m.add_argument("--points", type=int, default=1601)
    m.add_argument("--scan", type=_float_list, default=[], metavar="L1,L2,...",
                   help="comma-separated pulse heights to classify")
    m.add_argument("--pulse-center", type=float, default=-2.0)
    m.add_argument("--pulse-width", type=float, default=0.2)
    m.add_argument("--stem", default=None)
    m.set_defaults(func=cmd_macrostate)

    e = sub.add_parser("evolve", parents=[common], help="time evolution of a scenario")
    e.add_argument("names", nargs="*", help="built-in scenarios (see list-scenarios)")
    e.add_argument("--t-end", type=float, default=None)
    e.set_defaults(func=cmd_evolve)

    ls = sub.add_parser("list-scenarios", parents=[common], help="list built-in scenarios")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    for k, v in (("config", None), ("out", None), ("threads", 1), ("quiet", False)):
        if not hasattr(args, k):
            setattr(args, k, v)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        return args.func(args)
    except CLIError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except sc.ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except FixedPointDiverged as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
