"""Command-line entry point: ``mielab <subcommand> [--config PATH] [--seed N] ...``.

Every subcommand produces a header (tool version, resolved config, units),
a summary mapping and an optional table of rows.  Work is split into tasks
whose random streams are seeded by ``(seed, task index)``, so the thread
count never changes the output bytes.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, bmps, bounds, quasientropy, saw, stabilizer, statevec
from .lattice import build_lattice, dual_graph, lattice_from_spec, make_partition

SUBCOMMANDS = ("saw-enum", "zsaw", "bound", "mie-sim", "distill", "quasi", "stab-advantage", "sebd",
               "thresholds", "selfcheck")

SCHEMA_ID = "mielab/config/v1"

DEFAULTS = {
    "schema_version": 1,
    "seed": 0,
    "lattice": {"kind": "square", "Lx": 2, "Ly": 3, "dC": 1, "geometry": "strip"},
    "circuit": {"family": "holographic", "q": 2, "chi": 2, "d_C": 1, "bond_state": "maximal"},
    "weight": {"mode": "per_edge", "beta": 2.0},
    "policy": {"chi_max": 64, "cutoff": 0.0, "abort_tol": 1e-3},
    "saw": {"kind": "square", "n_max": 10, "l_polygon": 12, "l_max": 12, "k": 12},
    "samples": {"n_circuits": 8, "n_outcomes": 8, "n_unitaries": 200, "n_samples": 200, "n_runs": 10},
    "distill": {"d_prime": 2},
    "stabilizer": {"m": 1, "c2": 0.75, "bonds": "maximal", "cliffords": "random"},
    "sebd": {"bond_spectrum": [0.5, 0.5]},
    "selfcheck": {"criteria": [1, 2, 3, 4, 5, 6, 7, 8, 9]},
}

# lattice defaults that differ by subcommand when the config leaves them out
LATTICE_DEFAULTS = {
    "zsaw": {"kind": "triangular", "Lx": 3, "Ly": 3},
    "bound": {"kind": "triangular", "Lx": 3, "Ly": 3},
    "stab-advantage": {"kind": "square", "Lx": 2, "Ly": 2, "geometry": "bulk_triple", "triple": [0, 1, 2]},
    "sebd": {"kind": "square", "Lx": 4, "Ly": 4},
}

NAT_BIT = {"nats": "natural log", "bits": "log base 2"}

STAB_CHUNK = 25


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config loading


def load_schema():
    return json.loads(resources.files("mielab").joinpath("schema/config.schema.json").read_text())


def _line_of(text, path):
    """1-based line of the deepest key in ``path`` that can be located in ``text``."""
    pos, line = 0, 1
    for key in path:
        if isinstance(key, int):
            continue
        m = re.compile(r'"%s"\s*:' % re.escape(str(key))).search(text, pos)
        if m is None:
            break
        pos = m.start()
        line = text.count("\n", 0, pos) + 1
    return line


def parse_config(text, source="<config>"):
    """Parse and schema-validate a config document; errors carry ``source:line``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: e.message)
    if errors:
        lines = []
        for err in errors:
            path = list(err.absolute_path)
            if err.validator == "additionalProperties" and isinstance(err.instance, dict):
                # point at the first unexpected key rather than its parent object
                extra = [k for k in err.instance if k not in err.schema.get("properties", {})]
                path += extra[:1]
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            lines.append(f"{source}:{_line_of(text, path)}: {where}: {err.message}")
        raise ConfigError("\n".join(lines))
    return doc


def resolve_config(subcommand, doc=None, seed=None):
    cfg = copy.deepcopy(DEFAULTS)
    cfg["lattice"].update(LATTICE_DEFAULTS.get(subcommand, {}))
    for key, value in (doc or {}).items():
        if isinstance(value, dict):
            cfg[key].update(value)
        else:
            cfg[key] = value
    if seed is not None:
        cfg["seed"] = int(seed)
    return cfg


# ---------------------------------------------------------------------------
# helpers


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to ``None``."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    return obj


def task_rng(seed, index):
    return np.random.default_rng([int(seed), int(index)])


def run_tasks(fn, n_tasks, seed, threads):
    """``[fn(i, rng_i)]`` in task order, optionally on a thread pool."""
    args = [(i, task_rng(seed, i)) for i in range(n_tasks)]
    if threads <= 1 or n_tasks <= 1:
        return [fn(i, r) for i, r in args]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda a: fn(*a), args))


def _site_lattice(cfg):
    lat_cfg = cfg["lattice"]
    if lat_cfg["kind"] not in ("square", "triangular"):
        raise ConfigError(f"this subcommand needs a square or triangular site lattice, not {lat_cfg['kind']!r}")
    return build_lattice(lat_cfg["kind"], lat_cfg["Lx"], lat_cfg["Ly"])


def _partition(cfg, lat):
    lat_cfg = cfg["lattice"]
    return make_partition(lat, lat_cfg.get("geometry", "strip"), lat_cfg.get("triple"))


def _circuit(cfg, lat):
    c = cfg["circuit"]
    return statevec.CircuitSpec(c["family"], lat, q=c["q"], d_C=c["d_C"], chi=c["chi"], bond_state=c["bond_state"])


def _policy(cfg):
    p = cfg["policy"]
    return bmps.TruncationPolicy(p["chi_max"], p["cutoff"], p["abort_tol"])


# ---------------------------------------------------------------------------
# subcommands; each returns (summary, rows, units)


def cmd_saw_enum(cfg, threads):
    s = cfg["saw"]
    kind, n_max = s["kind"], s["n_max"]
    counts = saw.count_table(kind, n_max)
    polys = saw.polygon_table(kind, s["l_polygon"]) if s["l_polygon"] >= 3 else ()
    rows = []
    for n in range(n_max + 1):
        rows.append({"n": n, "walks": counts[n], "root": counts[n] ** (1.0 / n) if n else None,
                     "polygons": polys[n] if n < len(polys) else None})
    summary = {"kind": kind, "n_max": n_max, "growth_estimate": rows[-1]["root"]}
    return summary, rows, {"walks": "count", "root": "dimensionless", "polygons": "count"}


def _zsaw(cfg):
    lat_cfg = cfg["lattice"]
    w = cfg["weight"]
    l_max = cfg["saw"]["l_max"]
    if w["mode"] == "entropy_driven":
        from .acceptance import entropy_driven_Z

        lat = _site_lattice(cfg)
        spec = _circuit(cfg, lat)
        state = statevec.prepare(spec, task_rng(cfg["seed"], 0))
        return entropy_driven_Z(state, lat, _partition(cfg, lat))
    lat = lattice_from_spec(lat_cfg)
    if lat_cfg["kind"] == "square":
        lat = lat.triangulated()
    dual = dual_graph(lat)
    part = _partition(cfg, lat) if lat_cfg["kind"] != "cells" else make_partition(lat, lat_cfg.get("geometry", "strip"))
    return saw.partition_function(dual, part, saw.WeightModel.per_edge(w["beta"]), l_max, k=cfg["saw"]["k"])


def cmd_zsaw(cfg, threads):
    zp = _zsaw(cfg)
    z = zp.total_upper
    F = -math.log(z) if 0.0 < z < math.inf else (math.inf if z == 0.0 else -math.inf)
    summary = dict(zp.to_dict(), Z=z, F_nats=F if 0.0 < z < math.inf else None)
    return summary, [], {"Z": "dimensionless", "F_nats": "nats"}


def cmd_bound(cfg, threads):
    zp = _zsaw(cfg)
    rep = bounds.bound_from_partition(zp)
    summary = {"partition": zp.to_dict(), "certified": rep is not None}
    if rep is not None:
        summary["bound"] = rep.to_dict()
    return summary, [], {"mie_lower_nats": "nats", "mie_lower_bits": "bits", "F_saw": "nats"}


def cmd_mie_sim(cfg, threads):
    lat = _site_lattice(cfg)
    spec = _circuit(cfg, lat)
    part = _partition(cfg, lat)
    n_out = cfg["samples"]["n_outcomes"]
    A, B, _ = part.as_lists()
    rest = [i for i in range(lat.n_vertices) if i not in set(B)]
    A_local = [rest.index(i) for i in A]

    def task(i, rng):
        state = statevec.prepare(spec, rng)
        vals = []
        for smp in statevec.measure_region(state, B, rng, n_samples=n_out):
            vals.append(statevec.entropy(smp.post_state, A_local) if 0 < len(A_local) < smp.post_state.n_sites else 0.0)
        exact = statevec.exact_mean_mie(state, part) if len(B) <= 12 else None
        return {"circuit": i, "mie_sampled_nats": float(np.mean(vals)), "mie_exact_nats": exact,
                "mie_exact_bits": exact / bounds.LN2 if exact is not None else None}

    rows = run_tasks(task, cfg["samples"]["n_circuits"], cfg["seed"], threads)
    vals = np.array([r["mie_sampled_nats"] for r in rows])
    summary = {"mean_nats": float(vals.mean()), "mean_bits": float(vals.mean()) / bounds.LN2,
               "stderr_nats": float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0}
    return summary, rows, {"mie_sampled_nats": "nats", "mie_exact_nats": "nats", "mie_exact_bits": "bits"}


def cmd_distill(cfg, threads):
    lat = _site_lattice(cfg)
    spec = _circuit(cfg, lat)
    part = _partition(cfg, lat)
    A, B, _ = part.as_lists()
    rest = [i for i in range(lat.n_vertices) if i not in set(B)]
    A_local = [rest.index(i) for i in A]
    d_prime = cfg["distill"]["d_prime"]
    n_u = cfg["samples"]["n_unitaries"]

    def task(i, rng):
        state = statevec.prepare(spec, rng)
        smp = statevec.measure_region(state, B, rng, n_samples=1)[0]
        d = statevec.distill(smp.post_state, A_local, d_prime, n_u, rng)
        s = statevec.entropy(smp.post_state, A_local)
        return {"circuit": i, "entropy_nats": s, "eps": d["eps_estimate"], "eps_stderr": d["stderr"],
                "guarantee": statevec.distillation_guarantee(smp.post_state, A_local, d_prime),
                "entropy_bound_nats": bounds.distillation_entropy_bound(min(max(d["eps_estimate"], 0.0), 2.0), d_prime)}

    rows = run_tasks(task, cfg["samples"]["n_circuits"], cfg["seed"], threads)
    eps = np.array([r["eps"] for r in rows])
    summary = {"d_prime": d_prime, "eps_bar": float(eps.mean()),
               "eps_bar_stderr": float(eps.std(ddof=1) / math.sqrt(len(eps))) if len(eps) > 1 else 0.0}
    return summary, rows, {"entropy_nats": "nats", "eps": "trace distance", "entropy_bound_nats": "nats"}


def cmd_quasi(cfg, threads):
    lat = _site_lattice(cfg)
    spec = _circuit(cfg, lat)
    part = _partition(cfg, lat)
    dims = spec.site_dims()
    inst = quasientropy.holographic_instance(lat, part, spec.bond_renyi2(), {i: dims[i] for i in part.B})
    pred = quasientropy.replica_moments(inst)

    def task(i, rng):
        num, den = statevec.swap_moments_exact(statevec.prepare(spec, rng), part)
        return {"circuit": i, "numerator": num, "denominator": den}

    rows = run_tasks(task, cfg["samples"]["n_samples"], cfg["seed"], threads)
    nums = np.array([r["numerator"] for r in rows])
    dens = np.array([r["denominator"] for r in rows])
    k = math.sqrt(len(rows))
    se = (lambda v: float(v.std(ddof=1) / k) if len(v) > 1 else 0.0)
    summary = {"ising": pred, "sampled": {"numerator": float(nums.mean()), "numerator_stderr": se(nums),
                                          "denominator": float(dens.mean()), "denominator_stderr": se(dens),
                                          "Q2": math.log(dens.mean() / nums.mean())}}
    return summary, rows, {"Q2": "nats", "numerator": "dimensionless", "denominator": "dimensionless"}


def cmd_stab_advantage(cfg, threads):
    lat = _site_lattice(cfg)
    triple = tuple(cfg["lattice"].get("triple") or (0, 1, 2))
    st = cfg["stabilizer"]
    n = cfg["samples"]["n_samples"]
    sizes = [min(STAB_CHUNK, n - s) for s in range(0, n, STAB_CHUNK)]

    def task(i, rng):
        return stabilizer.tripartite_mie_experiment(st["m"], lat, triple, sizes[i], rng, c2=st["c2"],
                                                    bonds=st["bonds"], cliffords=st["cliffords"])

    chunks = run_tasks(task, len(sizes), cfg["seed"], threads)
    rows, site_hits, qubit_hits = [], 0, 0
    for c, res in enumerate(chunks):
        k = len(res["samples"])
        site_hits += round(res["site_premise"] * k)
        qubit_hits += round(res["qubit_rate"] * k)
        for r in res["samples"]:
            rows.append(dict(r, sample=len(rows)))
    summary = {"m": st["m"], "q": 2 ** st["m"], "n_samples": n,
               "site_premise": site_hits / n, "site_premise_ci": stabilizer.wilson_interval(site_hits, n),
               "qubit_rate": qubit_hits / n, "qubit_rate_ci": stabilizer.wilson_interval(qubit_hits, n),
               "c2": st["c2"], "premise_check": bounds.advantage_premise_check(st["m"])}
    return summary, rows, {"S_H": "ebits", "S_I": "ebits", "S_J": "ebits"}


def cmd_sebd(cfg, threads):
    lat = _site_lattice(cfg)
    spectrum = np.asarray(cfg["sebd"]["bond_spectrum"], dtype=float)
    spectrum = spectrum / spectrum.sum()
    chi = len(spectrum)
    bond = np.diag(np.sqrt(spectrum)).reshape(-1).astype(complex)
    spec = statevec.CircuitSpec("holographic", lat, chi=chi, bond_state=bond)
    policy = _policy(cfg)

    def task(i, rng):
        res = bmps.sebd_sample(spec, policy, rng)
        return [dict(run=i, **p) for p in res.profile], res

    out = run_tasks(task, cfg["samples"]["n_runs"], cfg["seed"], threads)
    rows = [r for prof, _ in out for r in prof]
    mid = max(1, lat.width // 2)
    mid_vals = [p["half_chain_entropy"] for p in rows if p["t"] == mid]
    summary = {"chi": chi, "bond_renyi2_nats": statevec.spectrum_entropy(spectrum, "renyi2"),
               "n_runs": len(out), "n_aborted": sum(res.aborted for _, res in out),
               "mid_column": mid, "mid_entropy_mean_nats": float(np.mean(mid_vals)) if mid_vals else None,
               "abort_tol": policy.abort_tol, "chi_max": policy.chi_max}
    return summary, rows, {"half_chain_entropy": "nats", "discarded": "relative weight"}


def cmd_thresholds(cfg, threads):
    rep = bounds.thresholds_report()
    return rep, [], {"S_crit_nats": "nats", "S_crit_bits": "bits", "log_mu_square_upper": "nats"}


def cmd_selfcheck(cfg, threads):
    from .acceptance import run_all

    results = run_all(set(cfg["selfcheck"]["criteria"]))
    for r in results:
        print(r.line(), file=sys.stderr)
    rows = [{"criterion": r.number, "name": r.name, "passed": r.passed} for r in results]
    summary = {"all_passed": all(r.passed for r in results),
               "details": {str(r.number): r.details for r in results}}
    return summary, rows, {"passed": "boolean"}


COMMANDS = {
    "saw-enum": cmd_saw_enum, "zsaw": cmd_zsaw, "bound": cmd_bound, "mie-sim": cmd_mie_sim,
    "distill": cmd_distill, "quasi": cmd_quasi, "stab-advantage": cmd_stab_advantage, "sebd": cmd_sebd,
    "thresholds": cmd_thresholds, "selfcheck": cmd_selfcheck,
}


# ---------------------------------------------------------------------------
# output


def render(header, summary, rows, fmt):
    if fmt == "json":
        return json.dumps(_clean({"header": header, "summary": summary, "rows": rows}), indent=2) + "\n"
    buf = io.StringIO()
    for key, value in _clean(header).items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=False)}\n")
    buf.write(f"# summary: {json.dumps(_clean(summary))}\n")
    if rows:
        fields = list(dict.fromkeys(k for r in rows for k in r))
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if v is None else json.dumps(v) if isinstance(v, (dict, list)) else v)
                             for k, v in _clean(r).items()})
    else:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for k, v in _clean(summary).items():
            writer.writerow([k, json.dumps(v)])
    return buf.getvalue()


def execute(subcommand, cfg, threads=1, fmt="json"):
    """Run ``subcommand`` on a resolved config; returns ``(text, summary, rows)``."""
    summary, rows, units = COMMANDS[subcommand](cfg, threads)
    header = {"tool": "mielab", "version": __version__, "schema": SCHEMA_ID, "subcommand": subcommand,
              "seed": cfg["seed"], "config": cfg, "units": units, "log_base": NAT_BIT}
    return render(header, summary, rows, fmt), summary, rows


def build_parser():
    p = argparse.ArgumentParser(prog="mielab", description="Measurement-induced entanglement bounds and simulators.")
    p.add_argument("--version", action="version", version=f"mielab {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="JSON config validated against the shipped schema")
        sp.add_argument("--seed", type=int, help="master seed (overrides the config)")
        sp.add_argument("--out", type=Path, help="output directory; stdout when omitted")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--figures", action="store_true", help="also write PNG figures (needs matplotlib and --out)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        doc = None
        if args.config is not None:
            doc = parse_config(args.config.read_text(), str(args.config))
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = resolve_config(args.subcommand, doc, args.seed)
        text, summary, rows = execute(args.subcommand, cfg, args.threads, args.format)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / f"{args.subcommand}.{args.format}"
        path.write_text(text)
        print(path, file=sys.stderr)
        if args.figures:
            from . import plotting

            for fig_path in plotting.figures_for(args.subcommand, summary, rows, args.out):
                print(fig_path, file=sys.stderr)
    if args.figures and args.out is None:
        print("--figures needs --out; no figures written", file=sys.stderr)
    if args.subcommand == "selfcheck" and not summary["all_passed"]:
        return 1
    return 0


# ---------------------------------------------------------------------------
# determinism


DETERMINISM_CONFIGS = {
    "saw-enum": {"saw": {"n_max": 8, "l_polygon": 8}},
    "zsaw": {"saw": {"l_max": 8}},
    "bound": {"weight": {"beta": 3.0}, "saw": {"l_max": 8}},
    "mie-sim": {"samples": {"n_circuits": 4, "n_outcomes": 3}},
    "distill": {"samples": {"n_circuits": 3, "n_unitaries": 32}},
    "quasi": {"lattice": {"Lx": 2, "Ly": 2}, "samples": {"n_samples": 6}},
    "stab-advantage": {"samples": {"n_samples": 60}},
    "sebd": {"lattice": {"Lx": 4, "Ly": 3}, "samples": {"n_runs": 4}},
    "thresholds": {},
    "selfcheck": {"selfcheck": {"criteria": [1, 3]}},
}


def determinism_check(seed=7, thread_counts=(1, 3), formats=("json", "csv")):
    """Run every subcommand at two thread counts and compare the output bytes."""
    out = []
    for name in SUBCOMMANDS:
        cfg = resolve_config(name, DETERMINISM_CONFIGS[name], seed)
        for fmt in formats:
            texts = [execute(name, copy.deepcopy(cfg), t, fmt)[0] for t in thread_counts]
            out.append({"subcommand": name, "format": fmt, "identical": len(set(texts)) == 1,
                        "bytes": len(texts[0].encode())})
    return out


if __name__ == "__main__":
    sys.exit(main())
