"""Command-line experiment runner.

Subcommands ``vqe``, ``aavqe``, ``gen-ec`` and ``spectrum`` read a key-value
recipe (``--config``), apply flag overrides, run, and write CSV traces plus a
JSON summary into ``--out``. Plots are left to downstream tools.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import seeding
from .ansatz import AnsatzSpec, random_parameters
from .driver import ScheduleConfig, first_solution_statistics, run_aavqe, run_vqe
from .errors import AavqeError, DomainError, GenerationError, ParseError, ResourceLimitError
from .estimator import EXACT, ShotBudget
from .hamiltonians import (
    DENSE_MAX_QUBITS,
    ChainSpec,
    PauliHamiltonian,
    build_chain,
    build_driver,
    build_exact_cover,
)
from .optim import SpsaConfig
from .oracle import PROFILE_MAX_QUBITS, adiabatic_error_profile, brute_force_exact_cover, exact_spectrum
from .problems import ExactCoverInstance, generate_hard_instance, load_instance, save_instance
from .simulator import DEFAULT_SEED

log = logging.getLogger("aavqe")

SCHEMA_VERSION = 1
SUCCESS_TOL = 0.1

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_GENERATION = 3
EXIT_IO = 4
EXIT_RESOURCE = 5


class ConfigError(AavqeError):
    pass


def parse_seeds(text: str) -> list[int]:
    """Parse ``"0-19"``, ``"1,4,7"`` or a mix such as ``"0-2,10"``."""
    seeds: list[int] = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        seeds.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return seeds


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


@dataclass
class ExperimentConfig:
    problem: str = "chain"
    n_qubits: int = 4
    lam: float = 1.0
    coupling_axis: str = "X"
    field_axis: str = "X"
    periodic: bool = False
    instance: Path | None = None
    depth: int = 3
    delta_s: float = 0.05
    grid: tuple[float, ...] | None = None
    iterations_per_step: int = 100
    max_iterations: int = 1000
    shots: ShotBudget = EXACT
    seeds: list[int] = field(default_factory=lambda: [DEFAULT_SEED])
    shared_initial: bool = False
    initial_seed: int = DEFAULT_SEED
    spsa: SpsaConfig = field(default_factory=SpsaConfig)
    retry: bool = True
    stop_at_first_solution: bool = False
    grid_points: int = 101
    out: Path = Path("results")
    workers: int = 1

    def instance_paths(self) -> list[Path]:
        if self.instance is None:
            return []
        if self.instance.is_dir():
            return sorted(self.instance.glob("*.ec"))
        return [self.instance]

    def validate(self) -> None:
        if self.problem not in ("chain", "ec", "driver"):
            raise ConfigError(f"unknown problem {self.problem!r}")
        if not self.seeds:
            raise ConfigError("seed list is empty")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.problem == "ec":
            if self.instance is None:
                raise ConfigError("problem 'ec' needs an instance path")
            if not self.instance.exists():
                raise ConfigError(f"instance path not found: {self.instance}")
            if not self.instance_paths():
                raise ConfigError(f"no .ec files under {self.instance}")


_SPSA_KEYS = {
    "spsa_a": ("a", float),
    "spsa_c": ("c", float),
    "spsa_big_a": ("big_a", float),
    "spsa_alpha": ("alpha", float),
    "spsa_gamma": ("gamma", float),
    "target_step": ("target_step", float),
    "convergence_window": ("convergence_window", int),
    "convergence_tol": ("convergence_tol", float),
}


def build_config(values: dict[str, str], base_dir: Path = Path(".")) -> ExperimentConfig:
    """Turn raw key-value strings into an :class:`ExperimentConfig`."""
    cfg = ExperimentConfig()
    spsa_kwargs = {}
    for key, raw in values.items():
        key = key.strip().lower().replace("-", "_")
        raw = str(raw).strip()
        try:
            if key == "problem":
                cfg.problem = raw.lower()
            elif key in ("n_qubits", "depth", "iterations_per_step", "max_iterations",
                         "initial_seed", "grid_points", "workers"):
                setattr(cfg, key, int(raw))
            elif key in ("lambda", "lam"):
                cfg.lam = float(raw)
            elif key in ("coupling_axis", "field_axis"):
                setattr(cfg, key, raw.upper())
            elif key in ("periodic", "shared_initial", "retry", "stop_at_first_solution"):
                setattr(cfg, key, _bool(raw))
            elif key == "instance":
                cfg.instance = (base_dir / raw) if not Path(raw).is_absolute() else Path(raw)
            elif key == "delta_s":
                cfg.delta_s = float(raw)
            elif key == "grid":
                cfg.grid = tuple(float(x) for x in raw.split(",")) if raw else None
            elif key == "shots":
                cfg.shots = ShotBudget.parse(raw)
            elif key == "seeds":
                cfg.seeds = parse_seeds(raw)
            elif key == "out":
                cfg.out = Path(raw)
            elif key in _SPSA_KEYS:
                name, conv = _SPSA_KEYS[key]
                spsa_kwargs[name] = None if raw.lower() in ("", "auto", "none") else conv(raw)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None
    if spsa_kwargs:
        cfg.spsa = replace(cfg.spsa, **spsa_kwargs)
    return cfg


def read_config_file(path: Path) -> dict[str, str]:
    text = path.read_text()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=str(path))
    except configparser.MissingSectionHeaderError:
        # bare key = value files are allowed; they land in a default section
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        parser.read_string("[experiment]\n" + text, source=str(path))
    out: dict[str, str] = {}
    for section in parser.sections():
        out.update(parser[section])
    return out


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict[str, str] = {}
    base = Path(".")
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        values.update(read_config_file(path))
        base = path.parent
    for item in args.set or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        values[k] = v
    for flag, key in (("seeds", "seeds"), ("shots", "shots"), ("delta_s", "delta_s"),
                      ("out", "out"), ("workers", "workers")):
        value = getattr(args, flag, None)
        if value is not None:
            values[key] = str(value)
    cfg = build_config(values, base)
    cfg.validate()
    return cfg


def problem_hamiltonian(cfg: ExperimentConfig, instance: ExactCoverInstance | None) -> PauliHamiltonian:
    if cfg.problem == "chain":
        return build_chain(ChainSpec(cfg.n_qubits, cfg.lam, cfg.coupling_axis, cfg.field_axis, cfg.periodic))
    if cfg.problem == "driver":
        return build_driver(cfg.n_qubits)
    return build_exact_cover(instance)


def prepare_output(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_probe"
    probe.write_text("")
    probe.unlink()


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n")


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


def _bits(value: int, n: int) -> str:
    return format(value, f"0{n}b")


def _config_summary(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["shots"] = str(cfg.shots)
    d["instance"] = None if cfg.instance is None else str(cfg.instance)
    d["out"] = str(cfg.out)
    d["grid"] = list(cfg.grid) if cfg.grid else None
    return d


def _map(fn, jobs, workers: int):
    if workers == 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


# --- vqe -------------------------------------------------------------------

def _vqe_job(job) -> dict:
    cfg, run_id, seed = job
    hp = problem_hamiltonian(cfg, None)
    spec = AnsatzSpec(hp.n_qubits, cfg.depth)
    init_seed = cfg.initial_seed if cfg.shared_initial else seeding.derive_seed(seed, seeding.INIT)
    theta0 = random_parameters(spec, init_seed)
    opt = replace(cfg.spsa, max_iterations=cfg.max_iterations,
                  rng_seed=seeding.derive_seed(seed, seeding.SPSA))
    result = run_vqe(hp, spec, theta0, opt, cfg.shots,
                     shot_seed=seeding.derive_seed(seed, seeding.SHOTS))
    trace = result.trace
    exact = result.exact_energies or [math.nan] * trace.iterations
    return {
        "run_id": run_id,
        "seed": seed,
        "rows": [(run_id, seed, k, v, e) for k, (v, e) in enumerate(zip(trace.values, exact))],
        "final_energy": trace.final_value if trace.values else math.nan,
        "final_energy_exact": hp.expectation(result.state.amplitudes),
        "iterations": trace.iterations,
        "evaluations": trace.n_evaluations,
        "converged": trace.converged,
        "failed": trace.failed,
    }


def cmd_vqe(cfg: ExperimentConfig) -> int:
    if cfg.problem == "ec":
        raise ConfigError("vqe supports problem = chain or driver")
    prepare_output(cfg.out)
    hp = problem_hamiltonian(cfg, None)
    ground = exact_spectrum(hp).ground_energy if hp.n_qubits <= DENSE_MAX_QUBITS else None
    jobs = [(cfg, run_id, seed) for run_id, seed in enumerate(cfg.seeds)]
    results = _map(_vqe_job, jobs, cfg.workers)
    write_csv(cfg.out / "traces.csv", ["run_id", "seed", "iteration", "energy", "exact_energy"],
              (row for r in results for row in r["rows"]))
    runs = []
    for r in results:
        r = {k: v for k, v in r.items() if k != "rows"}
        if ground is not None:
            r["success"] = bool(r["final_energy_exact"] - ground < SUCCESS_TOL)
        runs.append(r)
    write_json(cfg.out / "summary.json", {
        "schema_version": SCHEMA_VERSION,
        "command": "vqe",
        "config": _config_summary(cfg),
        "exact_ground_energy": ground,
        "runs": runs,
    })
    log.info("vqe: %d runs written to %s", len(runs), cfg.out)
    return EXIT_OK


# --- aavqe -----------------------------------------------------------------

def _aavqe_job(job) -> dict:
    cfg, run_id, seed, path = job
    instance = load_instance(path) if path is not None else None
    h0_n = instance.n_vars if instance is not None else cfg.n_qubits
    hp = problem_hamiltonian(cfg, instance)
    h0 = build_driver(h0_n)
    spec = AnsatzSpec(h0_n, cfg.depth)
    schedule = ScheduleConfig(
        delta_s=cfg.delta_s,
        iterations_per_step=cfg.iterations_per_step,
        budget=cfg.shots,
        master_seed=seed,
        grid=cfg.grid,
        retry=cfg.retry,
        stop_at_first_solution=cfg.stop_at_first_solution,
    )
    record = run_aavqe(h0, hp, spec, schedule, cfg.spsa, instance=instance)
    rows = []
    found = False
    g = 0
    for i, st in enumerate(record.steps):
        exact = st.exact_energies or [math.nan] * st.trace.iterations
        for k, (v, e) in enumerate(zip(st.trace.values, exact)):
            if st.solution_iteration is not None and k >= st.solution_iteration:
                found = True
            rows.append((run_id, seed, i, st.s, k, g, v, e, int(found)))
            g += 1
    return {
        "run_id": run_id,
        "seed": seed,
        "instance": None if path is None else str(path),
        "rows": rows,
        "n_qubits": h0_n,
        "final_bitstring": record.final_bitstring,
        "final_energy_exact": record.final_energy,
        "first_solution_s": record.first_solution_s,
        "detected_solution": None if record.first_solution_step is None
        else record.first_solution_step.solution,
        "wall_clock": record.wall_clock,
        "steps": [
            {
                "s": st.s,
                "iterations": st.trace.iterations,
                "final_energy_exact": st.final_energy_exact,
                "final_energy_sampled": st.final_energy_sampled,
                "solution": st.solution,
                "solution_iteration": st.solution_iteration,
                "retried": st.retried,
                "failed": st.trace.failed,
            }
            for st in record.steps
        ],
        "_record": record,
    }


def cmd_aavqe(cfg: ExperimentConfig) -> int:
    prepare_output(cfg.out)
    paths = cfg.instance_paths() if cfg.problem == "ec" else [None]
    jobs = []
    for path in paths:
        for seed in cfg.seeds:
            jobs.append((cfg, len(jobs), seed, path))
    results = _map(_aavqe_job, jobs, cfg.workers)
    write_csv(
        cfg.out / "traces.csv",
        ["run_id", "seed", "step", "s", "iteration", "iteration_global", "energy",
         "exact_energy", "solution_found_flag"],
        (row for r in results for row in r["rows"]),
    )
    oracle_cache: dict = {}
    runs = []
    for r in results:
        n = r["n_qubits"]
        entry = {k: v for k, v in r.items() if k not in ("rows", "_record")}
        entry["final_bits"] = _bits(r["final_bitstring"], n)
        if cfg.problem == "ec":
            key = r["instance"]
            if key not in oracle_cache:
                oracle_cache[key] = brute_force_exact_cover(load_instance(key))
            solutions = oracle_cache[key]
            entry["solutions"] = solutions
            entry["success"] = r["final_bitstring"] in solutions
            if r["detected_solution"] is not None:
                entry["detected_bits"] = _bits(r["detected_solution"], n)
        elif n <= DENSE_MAX_QUBITS:
            if "ground" not in oracle_cache:
                oracle_cache["ground"] = exact_spectrum(problem_hamiltonian(cfg, None)).ground_energy
            entry["exact_ground_energy"] = oracle_cache["ground"]
            entry["success"] = bool(r["final_energy_exact"] - oracle_cache["ground"] < SUCCESS_TOL)
        runs.append(entry)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "aavqe",
        "config": _config_summary(cfg),
        "runs": runs,
    }
    if cfg.problem == "ec" and not cfg.shots.is_exact:
        hist = first_solution_statistics([r["_record"] for r in results])
        payload["first_solution_histogram"] = {
            "s_values": hist.s_values,
            "counts": hist.counts,
            "overflow": hist.overflow,
        }
    write_json(cfg.out / "summary.json", payload)
    log.info("aavqe: %d runs written to %s", len(runs), cfg.out)
    return EXIT_OK


# --- gen-ec ----------------------------------------------------------------

def cmd_gen_ec(n_vars: int, count: int, seed: int, out_dir: Path, max_attempts: int = 10_000) -> int:
    if count < 1:
        raise ConfigError("count must be >= 1")
    if not 4 <= n_vars <= 24:
        raise ConfigError(f"n_vars must be in [4, 24], got {n_vars}")
    prepare_output(out_dir)
    entries = []
    for i in range(count):
        s = seed + i
        try:
            instance, report = generate_hard_instance(n_vars, s, max_attempts)
        except GenerationError as exc:
            raise GenerationError(f"seed {s}: {exc}") from None
        name = f"ec_n{n_vars}_s{s}.ec"
        save_instance(instance, out_dir / name,
                      [f"unique solution {report.solution} ({_bits(report.solution, n_vars)})",
                       f"generator seed {s}"])
        entries.append({
            "file": name,
            "seed": s,
            "n_vars": n_vars,
            "n_clauses": report.n_clauses,
            "solution": report.solution,
            "solution_bits": _bits(report.solution, n_vars),
        })
    write_json(out_dir / "manifest.json", {
        "schema_version": SCHEMA_VERSION,
        "command": "gen-ec",
        "instances": entries,
    })
    return EXIT_OK


# --- spectrum --------------------------------------------------------------

def cmd_spectrum(cfg: ExperimentConfig) -> int:
    instance = load_instance(cfg.instance_paths()[0]) if cfg.problem == "ec" else None
    hp = problem_hamiltonian(cfg, instance)
    if hp.n_qubits > PROFILE_MAX_QUBITS:
        raise ResourceLimitError(f"spectrum profiles are capped at {PROFILE_MAX_QUBITS} qubits")
    if cfg.grid_points < 2:
        raise ConfigError("grid_points must be >= 2")
    prepare_output(cfg.out)
    grid = np.linspace(0.0, 1.0, cfg.grid_points)
    profile = adiabatic_error_profile(build_driver(hp.n_qubits), hp, grid)
    write_csv(cfg.out / "profile.csv", ["s", "gap", "numerator", "ratio"],
              ((_fmt(p.s), _fmt(p.gap), _fmt(p.numerator), _fmt(p.ratio)) for p in profile.points))
    low = profile.min_gap
    write_json(cfg.out / "summary.json", {
        "schema_version": SCHEMA_VERSION,
        "command": "spectrum",
        "config": _config_summary(cfg),
        "min_gap": low.gap,
        "min_gap_s": low.s,
        "max_ratio": None if math.isinf(profile.max_ratio) else profile.max_ratio,
        "degenerate_points": sum(p.degenerate for p in profile.points),
    })
    return EXIT_OK


# --- entry point -----------------------------------------------------------

def _experiment_parser(sub, name: str, help_text: str, delta_s: bool = False):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--config", help="recipe file (key = value lines)")
    p.add_argument("--seeds", help="seed list, e.g. 0-19 or 1,2,5")
    p.add_argument("--shots", help="shots per measurement group, or 'exact'")
    if delta_s:
        p.add_argument("--delta-s", dest="delta_s", type=float, help="interpolation step")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, help="parallel runs")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a recipe key")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aavqe", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _experiment_parser(sub, "vqe", "plain VQE runs, one per seed")
    _experiment_parser(sub, "aavqe", "adiabatically assisted VQE runs", delta_s=True)
    _experiment_parser(sub, "spectrum", "gap and adiabatic-error profile along the interpolation")
    g = sub.add_parser("gen-ec", help="generate unique-solution EXACT COVER instances")
    g.add_argument("--n-vars", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--max-attempts", type=int, default=10_000)
    g.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gen-ec":
            return cmd_gen_ec(args.n_vars, args.count, args.seed, Path(args.out), args.max_attempts)
        cfg = load_config(args)
        if args.command == "vqe":
            return cmd_vqe(cfg)
        if args.command == "aavqe":
            return cmd_aavqe(cfg)
        return cmd_spectrum(cfg)
    except (ConfigError, DomainError, ParseError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GenerationError as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except ResourceLimitError as exc:
        print(f"size limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
