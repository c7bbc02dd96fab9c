"""Experiment runner: JSON config in, CSV/JSON results out.

Systems are described by a list of map builders (piecewise-affine, base-beta
greedy/lazy, intermittent) plus a probability vector; an experiment name
selects the computation.  Given the same config and seed the emitted data
rows are byte-identical across runs and thread counts; timestamps only
appear in the summary header.

Exit codes: 0 success, 1 numerical failure, 2 usage/config error,
3 enumeration size guard.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .beta import (
    build_beta_system,
    digit_limit_targets,
    digit_sequence,
    q_closed_form_golden,
    q_from_density,
    weighted_digit_averages,
)
from .cycles import (
    annealed_partition_direct,
    cycle_measure_xi,
    enumerate_cycles,
    enumerate_preimages,
    enumerate_skew_fixed_points,
    sample_averaged_measure,
)
from .errors import (
    ParameterError,
    RandcyclesError,
    SizeGuardError,
)
from .lsv import (
    LsvSpec,
    classify_case,
    lsv_map,
    neutral_mass_profile,
    return_time_tail,
)
from .maps import affine_markov_map, validate_markov, wraps_as_circle
from .measures import (
    GOLDEN_RATIO,
    golden_density,
    kolmogorov_distance,
    lebesgue_density,
    pelikan_index,
    ulam_stationary,
)
from .symbolic import RandomSystem, SampleWord, mixing_index


class ConfigError(ParameterError):
    """Malformed experiment configuration."""


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    if isinstance(v, (np.floating,)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path: Path, meta: dict, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        for k, v in meta.items():
            fh.write(f"# {k}: {v}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def build_system(config: dict):
    """System (and the beta bookkeeping when applicable) from a config dict.

    Returns (RandomSystem, BetaSystem | None).
    """
    try:
        spec = config["system"]
        entries = spec["maps"]
        p = tuple(float(q) for q in spec["p"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"system config incomplete: {exc}") from exc
    if len(entries) != len(p):
        raise ConfigError("system.p length must match system.maps length")

    kinds = [e.get("kind") for e in entries]
    if any(k in ("beta_greedy", "beta_lazy") for k in kinds):
        if not all(k in ("beta_greedy", "beta_lazy") for k in kinds):
            raise ConfigError("beta maps cannot be mixed with other kinds")
        betas = {float(e["beta"]) for e in entries}
        if len(betas) != 1:
            raise ConfigError("all beta maps must share one beta")
        beta = betas.pop()
        if kinds == ["beta_greedy", "beta_lazy"]:
            bs = build_beta_system(beta, p=p)
            return bs.system, bs
        # other arrangements get the maps but no digit bookkeeping
        bs = build_beta_system(beta)
        picked = tuple(
            bs.system.maps[0 if k == "beta_greedy" else 1] for k in kinds
        )
        return RandomSystem(picked, p, name="beta"), None

    maps = []
    for e in entries:
        kind = e.get("kind")
        if kind == "affine_markov":
            maps.append(
                affine_markov_map(
                    e["breakpoints"],
                    e["slopes"],
                    e["intercepts"],
                    exceptional=tuple(e.get("exceptional", ())),
                )
            )
        elif kind == "lsv":
            maps.append(lsv_map(float(e["alpha"])))
        else:
            raise ConfigError(f"unknown map kind {kind!r}")
    return RandomSystem(tuple(maps), p), None


def _n_list(config) -> list[int]:
    if "n_list" in config:
        return [int(v) for v in config["n_list"]]
    if "n" in config:
        return [int(config["n"])]
    raise ConfigError("experiment needs 'n' or 'n_list'")


def _seeds(config) -> list[int]:
    if "seeds" in config:
        return [int(v) for v in config["seeds"]]
    return [int(config.get("seed", 0))]


def _cells(config) -> int:
    return int(config.get("cells", 4096))


def _threads(config) -> int:
    return int(config.get("threads", 1))


def _cycle_rows(system, cs, bs):
    rows = []
    for c in cs.cycles:
        digits = ""
        if bs is not None:
            digits = ";".join(str(d) for d in digit_sequence(bs, c).digits)
        rows.append(
            (
                "-".join(str(s) for s in c.word),
                c.point,
                c.log_weight,
                ";".join(_fmt(v) for v in c.orbit),
                digits,
            )
        )
    return rows


def exp_validate(config, system, bs, out, meta):
    reports = []
    for i, m in enumerate(system.maps):
        rep = validate_markov(m, float(config.get("tol", 1e-9)))
        reports.append(
            {
                "map": i + 1,
                "passed": rep.passed,
                "max_endpoint_mismatch": rep.max_endpoint_mismatch,
                "nonexpansion_points": list(rep.nonexpansion_points),
                "unexpected_nonexpansion": list(rep.unexpected_nonexpansion),
                "wraps_as_circle": wraps_as_circle(m),
            }
        )
    alphabet, matrix = system.scheme()
    n0 = mixing_index(matrix, 64)
    return {
        "maps": reports,
        "symbols": len(alphabet),
        "transition_matrix": matrix.m.tolist(),
        "mixing_index": n0,
        "pelikan_index": pelikan_index(system),
        "identify_endpoints": system.identify_endpoints,
    }


def exp_cycles(config, system, bs, out, meta):
    threads = _threads(config)
    results = []
    for n in _n_list(config):
        for seed in _seeds(config):
            omega = SampleWord.sample(system, seed, n)
            cs = enumerate_cycles(system, omega, threads=threads)
            path = out / f"cycles_n{n}_seed{seed}.csv"
            write_csv(
                path,
                {**meta, "n": n, "seed": seed},
                ["word", "x", "log_weight", "orbit", "digits"],
                _cycle_rows(system, cs, bs),
            )
            results.append(
                {
                    "n": n,
                    "seed": seed,
                    "cycles": len(cs),
                    "logZ": cs.logZ,
                    "Z": cs.Z,
                    "pressure_per_sample": cs.logZ / n,
                    "duplicates_merged": cs.duplicates_merged,
                    "phantoms_rejected": cs.phantoms_rejected,
                    "endpoint_dropped": cs.endpoint_dropped,
                    "file": path.name,
                }
            )
    return {"runs": results}


def exp_equidistribute(config, system, bs, out, meta):
    threads = _threads(config)
    seed = _seeds(config)[0]
    density = ulam_stationary(system, _cells(config))
    rows = []
    for n in _n_list(config):
        omega = SampleWord.sample(system, seed, n)
        xi = cycle_measure_xi(enumerate_cycles(system, omega, threads=threads))
        rows.append((n, kolmogorov_distance(xi, density)))
    path = out / "equidistribute.csv"
    write_csv(path, {**meta, "seed": seed}, ["n", "kolmogorov_distance"], rows)
    dists = [d for _, d in rows]
    return {
        "seed": seed,
        "distances": [{"n": n, "kolmogorov_distance": d} for n, d in rows],
        "monotone_decreasing": all(b <= a for a, b in zip(dists, dists[1:])),
        "file": path.name,
    }


def exp_annealed(config, system, bs, out, meta):
    n = _n_list(config)[0]
    threads = _threads(config)
    skew = enumerate_skew_fixed_points(system, n, threads=threads)
    direct = annealed_partition_direct(system, n)
    path = out / f"annealed_measure_n{n}.csv"
    write_csv(
        path,
        {**meta, "n": n},
        ["point", "weight"],
        zip(skew.measure.points, skew.measure.weights),
    )
    eta_seeds = _seeds(config) if "seeds" in config else list(range(100))
    eta = sample_averaged_measure(system, n, eta_seeds, threads=threads)
    return {
        "n": n,
        "log_partition": skew.log_partition,
        "log_partition_direct": direct,
        "partition_rel_error": abs(skew.log_partition - direct),
        "annealed_pressure": skew.log_partition / n,
        "eta_seed_count": len(eta_seeds),
        "zeta_vs_eta_kolmogorov": kolmogorov_distance(skew.measure, eta),
        "file": path.name,
    }


def exp_digits(config, system, bs, out, meta):
    if bs is None:
        raise ConfigError("digits experiment needs a beta system")
    threads = _threads(config)
    q_ref = q_from_density(bs, system.p, ulam_stationary(system, _cells(config)))
    s_t, d_t = digit_limit_targets(q_ref)
    runs = []
    for n in _n_list(config):
        for seed in _seeds(config):
            omega = SampleWord.sample(system, seed, n)
            cs = enumerate_cycles(system, omega, threads=threads)
            stats = weighted_digit_averages(bs, cs)
            path = out / f"digits_n{n}_seed{seed}.csv"
            rows = []
            for c in cs.cycles:
                ds = digit_sequence(bs, c)
                freq = np.bincount(ds.digits, minlength=bs.floor + 1) / n
                from .beta import digit_stats as _dstats

                st = _dstats(ds)
                rows.append(
                    (
                        "-".join(str(s) for s in c.word),
                        c.point,
                        ";".join(str(d) for d in ds.digits),
                        *freq,
                        st.symmetric_mean,
                        st.mean_distance,
                    )
                )
            write_csv(
                path,
                {**meta, "n": n, "seed": seed},
                ["word", "x", "digits"]
                + [f"freq_{i}" for i in range(bs.floor + 1)]
                + ["symmetric_mean", "mean_distance"],
                rows,
            )
            runs.append(
                {
                    "n": n,
                    "seed": seed,
                    "freq_avg": stats.freq.tolist(),
                    "symmetric_mean_avg": stats.symmetric_mean,
                    "mean_distance_avg": stats.mean_distance,
                    "file": path.name,
                }
            )
    summary = {
        "q_reference": np.asarray(q_ref).tolist(),
        "symmetric_mean_target": s_t,
        "mean_distance_target": d_t,
        "runs": runs,
    }
    if abs(bs.beta - GOLDEN_RATIO) < 1e-12:
        summary["q_closed_form"] = list(q_closed_form_golden(system.p[0]))
    return summary


def exp_stationary(config, system, bs, out, meta):
    density = ulam_stationary(system, _cells(config))
    path = out / "stationary_density.csv"
    write_csv(
        path,
        meta,
        ["breakpoint_lo", "breakpoint_hi", "value"],
        zip(density.breakpoints[:-1], density.breakpoints[1:], density.values),
    )
    summary = {
        "cells": len(density.values),
        "pelikan_index": pelikan_index(system),
        "file": path.name,
    }
    if bs is not None and abs(bs.beta - GOLDEN_RATIO) < 1e-12:
        ref = golden_density(system.p[0])
        grid = np.linspace(
            system.ambient.lo + 1e-9, system.ambient.hi - 1e-9, 2048
        )
        grid = np.array(
            [g for g in grid if all(abs(g - q) > 1e-3 for q in ref.breakpoints)]
        )
        diffs = [abs(density.value_at(g) - ref.value_at(g)) for g in grid]
        summary["golden_supnorm_error"] = float(max(diffs))
        summary["q_from_density"] = q_from_density(bs, system.p, density).tolist()
        summary["q_closed_form"] = list(q_closed_form_golden(system.p[0]))
    return summary


def exp_lsv_tails(config, system, bs, out, meta):
    exps = []
    files = []
    n_max = int(config.get("n_max", 1000))
    for i, m in enumerate(system.maps):
        if m.branches[0].kind != "lsv_left":
            continue
        tail = return_time_tail(m, 1, n_max)
        path = out / f"tails_map{i + 1}.csv"
        write_csv(
            path,
            {**meta, "map": i + 1, "alpha": m.branches[0].alpha},
            ["n", "tail_measure"],
            zip(tail.ns, tail.tails),
        )
        files.append(path.name)
        exps.append(
            {"map": i + 1, "alpha": m.branches[0].alpha, "exponent": tail.exponent}
        )
    alphas = tuple(
        m.branches[0].alpha for m in system.maps if m.branches[0].kind == "lsv_left"
    )
    summary = {
        "tails": exps,
        "case": classify_case(LsvSpec(alphas, system.p)) if alphas else None,
        "files": files,
    }
    if "n" in config or "n_list" in config:
        seed = _seeds(config)[0]
        prows = []
        for n in _n_list(config):
            omega = SampleWord.sample(system, seed, n)
            prof = neutral_mass_profile(system, omega, n, threads=_threads(config))
            for eps, mass in prof.masses:
                prows.append((n, eps, mass, prof.neutral_weight_normalized))
        ppath = out / "neutral_profile.csv"
        write_csv(
            ppath,
            {**meta, "seed": seed},
            ["n", "eps", "mass", "neutral_weight_normalized"],
            prows,
        )
        summary["profile_file"] = ppath.name
    return summary


def exp_preimages(config, system, bs, out, meta):
    if "x0" not in config:
        raise ConfigError("preimages experiment needs 'x0'")
    x0 = float(config["x0"])
    n = _n_list(config)[0]
    seed = _seeds(config)[0]
    omega = SampleWord.sample(system, seed, n)
    # atoms at the preimages themselves: the sharper equidistribution probe
    measure = enumerate_preimages(system, omega, n, x0, spread_orbits=False)
    path = out / f"preimages_n{n}_seed{seed}.csv"
    write_csv(
        path,
        {**meta, "n": n, "seed": seed, "x0": _fmt(x0)},
        ["point", "weight"],
        zip(measure.points, measure.weights),
    )
    summary = {
        "n": n,
        "seed": seed,
        "x0": x0,
        "atoms": len(measure),
        "kolmogorov_to_lebesgue": kolmogorov_distance(
            measure, lebesgue_density(system.ambient)
        ),
        "file": path.name,
    }
    if config.get("cells"):
        density = ulam_stationary(system, _cells(config))
        summary["kolmogorov_to_stationary"] = kolmogorov_distance(measure, density)
    return summary


EXPERIMENTS = {
    "validate": exp_validate,
    "cycles": exp_cycles,
    "equidistribute": exp_equidistribute,
    "annealed": exp_annealed,
    "digits": exp_digits,
    "stationary": exp_stationary,
    "lsv-tails": exp_lsv_tails,
    "preimages": exp_preimages,
}


def run(config: dict, out_dir=None) -> dict:
    """Run one experiment; returns the summary dict (also written to disk)."""
    name = config.get("experiment")
    if name not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {name!r}; valid names: {sorted(EXPERIMENTS)}"
        )
    out = Path(out_dir if out_dir is not None else config.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    system, bs = build_system(config)
    meta = {
        "config_hash": config_hash(config),
        "version": __version__,
        "experiment": name,
    }
    result = EXPERIMENTS[name](config, system, bs, out, meta)
    summary = {
        **meta,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "result": result,
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, default=float)
        fh.write("\n")
    return summary


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="randcycles",
        description="Random-cycle experiments for interval-map systems",
    )
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--n", type=int)
    parser.add_argument("--n-list", help="comma-separated periods")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--seeds", help="comma-separated seeds")
    parser.add_argument("--x0", type=float)
    parser.add_argument("--cells", type=int)
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--threads", type=int)
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2

    for key in ("n", "seed", "x0", "cells", "out", "threads"):
        val = getattr(args, key)
        if val is not None:
            config[key] = val
    if args.n_list:
        config["n_list"] = [int(v) for v in args.n_list.split(",")]
    if args.seeds:
        config["seeds"] = [int(v) for v in args.seeds.split(",")]

    try:
        summary = run(config)
    except (ConfigError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return 3
    except RandcyclesError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    out = Path(config.get("out", "."))
    print(f"wrote {out / 'summary.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
