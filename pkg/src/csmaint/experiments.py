"""Experiment configs, presets and the batch commands behind the CLI.

Each ``cmd_*`` function takes an :class:`ExperimentConfig`, writes CSV files
under ``cfg.out_dir`` and returns the list of paths it wrote.  Every file
starts with a ``# config_sha256=... seed=...`` comment and a header row.
"""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import csvio, kvtext
from .analytic import InterferenceLaw, analyze_sharing_area, mhc_density_baseline
from .config import Mode, PhyMacConfig
from .des import (DegenerateWindowError, build_scenario, concurrent_tx_histogram, lattice_scenario,
                  run_des, time_window, trace_to_samples, write_trace_csv)
from .pointprocess import MonteCarloConfig, Process, run_monte_carlo
from .stats import EmpiricalSample, empirical_cdf, ks_distance, ks_to_law, log_histogram_pdf, merge

log = logging.getLogger(__name__)

SWEEP_LAMBDAS = (1e-4, 2e-4, 3e-4, 4e-4, 5e-4)


class ExperimentError(RuntimeError):
    pass


class MissingInputError(ExperimentError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    lambdas: tuple[float, ...] = SWEEP_LAMBDAS
    cs_ranges_m: tuple[float, ...] = (50.0, 70.0, 100.0)
    payloads_bytes: tuple[int, ...] = (500, 1000)
    modes: tuple[Mode, ...] = (Mode.RTS_CTS, Mode.BASIC)
    processes: tuple[Process, ...] = (Process.MHC, Process.SSI)
    out_dir: str = "results"
    seed: int = 1
    repetitions: int = 50
    duration_us: int = 30_000_000
    iterations: int = 100_000
    exclusion_m: float = 70.0
    region_radius_m: float = 282.0
    grid_m: float = 500.0
    topology: str = "poisson"  # or "lattice" (9x9 grid at 50 m)
    bins_per_decade: int = 10
    law_t_min: float = 1e-14
    law_t_max: float = 1e-6
    law_points_per_decade: int = 20
    write_traces: bool = True
    workers: int = 1
    phy: dict = field(default_factory=dict)  # PhyMacConfig overrides

    def __post_init__(self):
        for name in ("lambdas", "cs_ranges_m", "payloads_bytes", "modes", "processes"):
            if not getattr(self, name):
                raise ExperimentError(f"sweep list {name} is empty")
        if any(v <= 0 for v in self.lambdas) or any(v <= 0 for v in self.cs_ranges_m):
            raise ExperimentError("densities and ranges must be positive")
        if self.iterations < 1:
            raise ExperimentError("iterations must be >= 1")
        if self.repetitions < 1:
            raise ExperimentError("repetitions must be >= 1")
        if self.duration_us < 1:
            raise ExperimentError("duration_us must be >= 1")
        if self.topology not in ("poisson", "lattice"):
            raise ExperimentError(f"unknown topology {self.topology!r}")
        if not 0 < self.law_t_min < self.law_t_max:
            raise ExperimentError("law grid needs 0 < law_t_min < law_t_max")
        PhyMacConfig.from_dict(dict(self.phy))  # validates overrides

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def phy_config(self, mode: Mode, payload_bytes: int, cs_range_m: float) -> PhyMacConfig:
        base = PhyMacConfig.from_dict(dict(self.phy))
        return base.replace(mode=mode, payload_bits=8 * payload_bytes).with_cs_range(cs_range_m)

    def sweep(self):
        for mode in self.modes:
            for payload in self.payloads_bytes:
                for r in self.cs_ranges_m:
                    for lam in self.lambdas:
                        yield mode, payload, r, lam

    def to_entries(self) -> dict[str, object]:
        e = {
            "lambda": list(self.lambdas),
            "cs_range_m": list(self.cs_ranges_m),
            "payload_bytes": list(self.payloads_bytes),
            "mode": [m.value for m in self.modes],
            "process": [p.value for p in self.processes],
            "seed": self.seed,
            "repetitions": self.repetitions,
            "duration_us": self.duration_us,
            "iterations": self.iterations,
            "exclusion_m": self.exclusion_m,
            "region_radius_m": self.region_radius_m,
            "grid_m": self.grid_m,
            "topology": self.topology,
            "bins_per_decade": self.bins_per_decade,
            "law_t_min": self.law_t_min,
            "law_t_max": self.law_t_max,
            "law_points_per_decade": self.law_points_per_decade,
            "write_traces": self.write_traces,
        }
        e.update(sorted(self.phy.items()))
        return e

    def to_kv(self) -> str:
        return kvtext.dumps({"out": self.out_dir, **self.to_entries(), "workers": self.workers})

    def digest(self) -> str:
        """Hash of everything that affects results (not the output path or worker count)."""
        text = kvtext.dumps(self.to_entries())
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def comment(self) -> list[str]:
        return [f"config_sha256={self.digest()} seed={self.seed}"]


_LIST_KEYS = {
    "lambda": ("lambdas", float),
    "cs_range_m": ("cs_ranges_m", float),
    "payload_bytes": ("payloads_bytes", int),
    "mode": ("modes", Mode.parse),
    "process": ("processes", lambda s: Process(s.lower())),
}
_SCALAR_KEYS = {
    "out": ("out_dir", str),
    "seed": ("seed", int),
    "repetitions": ("repetitions", int),
    "duration_us": ("duration_us", int),
    "iterations": ("iterations", int),
    "exclusion_m": ("exclusion_m", float),
    "region_radius_m": ("region_radius_m", float),
    "grid_m": ("grid_m", float),
    "topology": ("topology", str),
    "bins_per_decade": ("bins_per_decade", int),
    "law_t_min": ("law_t_min", float),
    "law_t_max": ("law_t_max", float),
    "law_points_per_decade": ("law_points_per_decade", int),
    "write_traces": ("write_traces", kvtext.parse_bool),
    "workers": ("workers", int),
}
_PHY_KEYS = {f.name for f in dataclasses.fields(PhyMacConfig)} - {"mode", "payload_bits", "cs_threshold_w"}


def config_from_entries(entries: dict[str, str], base: ExperimentConfig | None = None) -> ExperimentConfig:
    kwargs = {}
    phy = dict(base.phy) if base else {}
    for key, raw in entries.items():
        if key in _LIST_KEYS:
            name, conv = _LIST_KEYS[key]
            kwargs[name] = tuple(kvtext.parse_list(raw, conv))
        elif key in _SCALAR_KEYS:
            name, conv = _SCALAR_KEYS[key]
            kwargs[name] = conv(raw)
        elif key in _PHY_KEYS:
            phy[key] = raw
        elif key == "preset":
            continue
        else:
            raise ExperimentError(f"unknown config key {key!r}")
    kwargs["phy"] = phy
    return (base or ExperimentConfig()).replace(**kwargs)


def load_config(path: str | None = None, preset: str | None = None) -> ExperimentConfig:
    entries = kvtext.load(path) if path else {}
    preset = preset or entries.get("preset")
    base = PRESETS[preset] if preset else None
    if preset and preset not in PRESETS:
        raise ExperimentError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    return config_from_entries(entries, base)


_RTS_500_70 = dict(modes=(Mode.RTS_CTS,), payloads_bytes=(500,), cs_ranges_m=(70.0,))

# Reference experiments at CI scale: short runs and few repetitions.
PRESETS: dict[str, ExperimentConfig] = {
    "lattice-concurrency": ExperimentConfig(
        modes=(Mode.BASIC,), payloads_bytes=(500,), cs_ranges_m=(70.0,), lambdas=(1e-4,),
        topology="lattice", repetitions=1, duration_us=3_000_000, out_dir="results/lattice-concurrency"),
    "pon-sweep": ExperimentConfig(out_dir="results/pon-sweep"),
    "density-sweep": ExperimentConfig(out_dir="results/density-sweep"),
    "interference-pdf": ExperimentConfig(
        **_RTS_500_70, repetitions=2, duration_us=2_000_000, iterations=20_000,
        out_dir="results/interference-pdf"),
    "model-ranking": ExperimentConfig(
        **_RTS_500_70, lambdas=(1e-4, 5e-4), repetitions=5, duration_us=3_000_000,
        iterations=20_000, out_dir="results/model-ranking"),
}


# -- helpers -----------------------------------------------------------------

def _tag(mode: Mode, payload: int, r: float, lam: float) -> str:
    return f"{mode.value}_{payload}B_R{r:g}_lam{lam:g}"


def _path(cfg: ExperimentConfig, *parts) -> str:
    return os.path.join(cfg.out_dir, *parts)


def _write_distribution(cfg: ExperimentConfig, folder: str, sample: EmpiricalSample) -> list[str]:
    comment = cfg.comment()
    paths = [os.path.join(folder, n) for n in ("samples.csv", "cdf.csv", "pdf.csv")]
    sample.to_csv(paths[0], comment)
    empirical_cdf(sample).to_csv(paths[1], comment)
    if np.any(sample.values > 0):
        hist = log_histogram_pdf(sample, cfg.bins_per_decade)
        hist.to_csv(paths[2], comment + [f"atom_mass={hist.atom_mass!r}"])
    else:
        csvio.write_rows(paths[2], ["bin_left", "bin_right", "density"], [], comment + ["atom_mass=1.0"])
    return paths


def _pool_map(fn, items, workers: int):
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def rep_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(rep,)).generate_state(1)[0])


# -- analyze -----------------------------------------------------------------

def _analyze_point(args):
    cfg, mode, payload, r, lam = args
    phy = cfg.phy_config(mode, payload, r)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            a = analyze_sharing_area(lam, phy)
        except Exception as exc:  # reported per sweep point
            return (mode, payload, r, lam, None, f"error: {type(exc).__name__}: {exc}")
    status = "ok" if not caught else "warning: " + "; ".join(str(w.message) for w in caught)
    return (mode, payload, r, lam, a, status)


def cmd_analyze(cfg: ExperimentConfig) -> list[str]:
    points = [(cfg, *p) for p in cfg.sweep()]
    results = _pool_map(_analyze_point, points, cfg.workers)
    key = ["lambda", "cs_range_m", "mode", "payload_bytes"]
    pon_rows, dens_rows, cdf_rows, pdf_rows = [], [], [], []
    decades = math.log10(cfg.law_t_max / cfg.law_t_min)
    grid = np.logspace(math.log10(cfg.law_t_min), math.log10(cfg.law_t_max),
                       int(round(decades * cfg.law_points_per_decade)) + 1)
    p_w = PhyMacConfig.from_dict(dict(cfg.phy)).tx_power_w
    for mode, payload, r, lam, a, status in results:
        k = [lam, r, mode.value, payload]
        if a is None:
            pon_rows.append(k + ["nan", "nan", status])
            dens_rows.append(k + ["nan", "nan", mhc_density_baseline(lam, r), status])
            continue
        pon_rows.append(k + [a.p_on_star, a.residual, status])
        dens_rows.append(k + [a.e_z, a.lambda_eff, mhc_density_baseline(lam, r), status])
        law = InterferenceLaw(a.lambda_eff, p_w)
        for t, c, f in zip(grid.tolist(), law.cdf(grid).tolist(), law.pdf(grid).tolist()):
            cdf_rows.append(k + [a.lambda_eff, t, c])
            pdf_rows.append(k + [a.lambda_eff, t, f])
    comment = cfg.comment()
    paths = [_path(cfg, n) for n in ("pon.csv", "density.csv", "law_cdf.csv", "law_pdf.csv")]
    csvio.write_rows(paths[0], key + ["p_on_star", "residual", "status"], pon_rows, comment)
    csvio.write_rows(paths[1], key + ["e_z", "lambda_eff", "lambda_mhc", "status"], dens_rows, comment)
    csvio.write_rows(paths[2], key + ["lambda_eff", "t_watts", "cdf"], cdf_rows, comment)
    csvio.write_rows(paths[3], key + ["lambda_eff", "t_watts", "pdf"], pdf_rows, comment)
    return paths


# -- sample --------------------------------------------------------------------

def cmd_sample(cfg: ExperimentConfig) -> list[str]:
    p_w = PhyMacConfig.from_dict(dict(cfg.phy)).tx_power_w
    paths, summary = [], []
    for process in cfg.processes:
        for lam in cfg.lambdas:
            mc = MonteCarloConfig(process, lam, cfg.exclusion_m, cfg.region_radius_m,
                                  cfg.iterations, cfg.seed, p_w)
            res = run_monte_carlo(mc, workers=cfg.workers)
            folder = _path(cfg, "sample", f"{process.value}_lam{lam:g}")
            paths += _write_distribution(cfg, folder, res.sample)
            summary.append([process.value, lam, cfg.iterations, float(res.aggregate_w.mean()),
                            res.inner_density(), mhc_density_baseline(lam, cfg.exclusion_m)
                            if cfg.exclusion_m > 0 else lam, res.resampled])
    path = _path(cfg, "sample", "summary.csv")
    csvio.write_rows(path, ["process", "lambda", "iterations", "mean_aggregate_w",
                            "inner_density", "lambda_mhc", "resampled"], summary, cfg.comment())
    return paths + [path]


# -- des -----------------------------------------------------------------------

def _des_run(args):
    cfg, mode, payload, r, lam, rep = args
    phy = cfg.phy_config(mode, payload, r)
    seed = rep_seed(cfg.seed, rep)
    sets = None
    if cfg.topology == "lattice":
        sc, sets = lattice_scenario(phy, cfg.duration_us, seed, cs_range_m=r)
    else:
        sc = build_scenario(lam, phy, cfg.duration_us, seed, grid_m=cfg.grid_m)
    trace = run_des(sc)
    try:
        window = time_window(trace)
    except DegenerateWindowError as exc:
        return dict(rep=rep, seed=seed, scenario=sc, trace=trace, window=None, status=str(exc))
    out = dict(rep=rep, seed=seed, scenario=sc, window=window, status="ok",
               sample=trace_to_samples(trace, window),
               attempts=int(trace.attempts.sum()), successes=int(trace.successes.sum()),
               collisions=int(trace.collisions.sum()), drops=int(trace.drops.sum()))
    if sets:
        out["concurrency"] = {k: concurrent_tx_histogram(trace, v, window) for k, v in sets.items()}
    if cfg.write_traces:
        out["trace"] = trace
    return out


def cmd_des(cfg: ExperimentConfig) -> list[str]:
    paths = []
    combos = list(cfg.sweep()) if cfg.topology == "poisson" else [
        (m, p, r, cfg.lambdas[0]) for m in cfg.modes for p in cfg.payloads_bytes for r in cfg.cs_ranges_m]
    comment = cfg.comment()
    for mode, payload, r, lam in combos:
        tag = "lattice" if cfg.topology == "lattice" else _tag(mode, payload, r, lam)
        if cfg.topology == "lattice" and len(combos) > 1:
            tag = f"lattice_{mode.value}_{payload}B_R{r:g}"
        folder = _path(cfg, "des", tag)
        runs = _pool_map(_des_run, [(cfg, mode, payload, r, lam, rep) for rep in range(cfg.repetitions)],
                         cfg.workers)
        rows, samples, conc = [], [], []
        for run in runs:
            sc = run["scenario"]
            with open(os.path.join(_ensure(folder), f"scenario_{run['rep']:03d}.txt"), "w", encoding="utf-8") as fh:
                fh.write(sc.to_kv())
            paths.append(fh.name)
            if "trace" in run:
                p = os.path.join(folder, f"trace_{run['rep']:03d}.csv")
                write_trace_csv(run["trace"], p, comment)
                paths.append(p)
            w = run["window"]
            rows.append([run["rep"], run["seed"], sc.n_links, w[0] if w else "", w[1] if w else "",
                         run.get("attempts", ""), run.get("successes", ""), run.get("collisions", ""),
                         run.get("drops", ""), run["status"]])
            if w is None:
                log.warning("%s rep %d skipped: %s", tag, run["rep"], run["status"])
                continue
            samples.append(run["sample"])
            for name, hist in run.get("concurrency", {}).items():
                conc += [[run["rep"], name, level, frac] for level, frac in enumerate(hist.tolist())]
        skipped = sum(1 for r_ in runs if r_["window"] is None)
        p = os.path.join(folder, "runs.csv")
        csvio.write_rows(p, ["rep", "seed", "links", "window_start_us", "window_end_us", "attempts",
                             "successes", "collisions", "drops", "status"], rows,
                         comment + [f"skipped={skipped}"])
        paths.append(p)
        if samples:
            paths += _write_distribution(cfg, folder, merge(*samples))
        if conc:
            p = os.path.join(folder, "concurrency.csv")
            csvio.write_rows(p, ["rep", "set", "level", "fraction"], conc, comment)
            paths.append(p)
    return paths


def _ensure(folder: str) -> str:
    os.makedirs(folder, exist_ok=True)
    return folder


# -- compare -------------------------------------------------------------------

def _read_density(cfg: ExperimentConfig) -> dict:
    path = _path(cfg, "density.csv")
    if not os.path.exists(path):
        raise MissingInputError(f"{path} not found; run 'analyze' first")
    header, rows = csvio.read_rows(path)
    idx = {h: i for i, h in enumerate(header)}
    out = {}
    for row in rows:
        key = (Mode.parse(row[idx["mode"]]), int(row[idx["payload_bytes"]]),
               float(row[idx["cs_range_m"]]), float(row[idx["lambda"]]))
        out[key] = float(row[idx["lambda_eff"]])
    return out


def cmd_compare(cfg: ExperimentConfig) -> list[str]:
    density = _read_density(cfg)
    p_w = PhyMacConfig.from_dict(dict(cfg.phy)).tx_power_w
    rows, missing = [], []
    for mode, payload, r, lam in cfg.sweep():
        key = (mode, payload, r, lam)
        if key not in density:
            missing.append(f"density.csv row for {_tag(*key)}")
            continue
        lam_eff = density[key]
        des_path = _path(cfg, "des", _tag(*key), "samples.csv")
        laws = {"analytic_lambda_eff": InterferenceLaw(lam_eff, p_w),
                "analytic_lambda": InterferenceLaw(lam, p_w)}
        base = [lam, r, mode.value, payload]
        rows.append(base + ["analytic_lambda_eff", "analytic_lambda",
                            _law_gap(laws["analytic_lambda_eff"], laws["analytic_lambda"]), 0.0])
        if not os.path.exists(des_path):
            missing.append(des_path)
            continue
        des = EmpiricalSample.from_csv(des_path)
        des_rest, atom = des.split_atom()
        for name, law in laws.items():
            ks, _ = ks_to_law(des, law)
            rows.append(base + [name, "des", ks, atom])
        for process in cfg.processes:
            mc_path = _path(cfg, "sample", f"{process.value}_lam{lam:g}", "samples.csv")
            if not os.path.exists(mc_path):
                missing.append(mc_path)
                continue
            mc_rest, _ = EmpiricalSample.from_csv(mc_path).split_atom()
            ks = ks_distance(mc_rest, des_rest) if mc_rest is not None and des_rest is not None else 1.0
            rows.append(base + [process.value, "des", ks, atom])
    if not rows or all(r[5] == "analytic_lambda" for r in rows):
        raise MissingInputError("no empirical results to compare: " + "; ".join(missing))
    path = _path(cfg, "compare.csv")
    csvio.write_rows(path, ["lambda", "cs_range_m", "mode", "payload_bytes", "model", "reference",
                            "ks", "atom_mass"], rows,
                     cfg.comment() + [f"missing={len(missing)}"])
    for m in missing:
        log.warning("missing input: %s", m)
    return [path]


def _law_gap(a: InterferenceLaw, b: InterferenceLaw, n: int = 4001) -> float:
    """Sup distance between two analytic laws on a quantile grid of both."""
    q = np.linspace(1e-6, 1 - 1e-6, n)
    t = np.concatenate([a.quantile(q), b.quantile(q)])
    return float(np.max(np.abs(a.cdf(t) - b.cdf(t))))


def cmd_all(cfg: ExperimentConfig) -> list[str]:
    paths = cmd_analyze(cfg)
    if cfg.topology == "lattice":
        return paths + cmd_des(cfg)
    paths += cmd_sample(cfg)
    paths += cmd_des(cfg)
    return paths + cmd_compare(cfg)
