"""Command-line orchestration.

Commands: appgen, scale, pca, dmaps, partition, density, sample, metrics,
pipeline, reproduce-app1, config. Matrix files are CSV with one realization
per row; reports are JSON. Every run writes a manifest (config snapshot,
seeds, hyperparameters, diagnostics, output digests, timings) next to its
artifacts. Exit codes: 0 success, 2 config error, 3 numeric failure,
4 convergence failure.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, _io, appgen, dmaps, metrics, normalize, partition, sampler
from ._kernels import backend_name
from ._rng import substream
from .density import kde_logpdf, kde_model
from .errors import ConfigInvalid, NoConvergence, NumericError, PlomError

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CONVERGENCE = 4

CONFIG_DEFAULTS = {
    "input": (str, None, "training CSV, one realization per row"),
    "transpose": (bool, False, "input stores one realization per column"),
    "scale_method": (str, "min-max", "feature scaling: min-max | standardize | none"),
    "eps_pca": (float, 1e-3, "PCA truncation tolerance"),
    "mode": (str, "with-group", "sampling mode: no-plom | no-group | with-group"),
    "constraints": (bool, True, "enforce unit second moments per group"),
    "tau_tol": (float, partition.TAU_TOL, "discarded-dependence tolerance for the partition"),
    "eps_dm": (float, None, "kernel width override (auto when unset)"),
    "n_mc": (int, 50, "retained sample matrices"),
    "f0": (float, 4.0, "ISDE damping"),
    "delta_r": (float, None, "ISDE step (auto: 2 pi s_hat / 20)"),
    "n_burn": (int, None, "burn-in steps (auto)"),
    "m0": (int, None, "steps between retained matrices (auto)"),
    "seed": (int, 0, "root seed; all stages derive named substreams"),
    "eps_list": (str, "0.05,0.1", "epsilons for the probability bounds"),
    "out_dir": (str, "plom-out", "artifact directory"),
}


def _parse_config_file(path):
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigInvalid(f"{path}:{lineno}: expected 'key = value'")
            key, val = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_DEFAULTS:
                raise ConfigInvalid(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = val
    return values


def _coerce_config(values):
    cfg = {k: default for k, (_, default, _) in CONFIG_DEFAULTS.items()}
    for key, raw in values.items():
        typ = CONFIG_DEFAULTS[key][0]
        if raw in ("", "none", "None", "auto"):
            cfg[key] = None
        elif typ is bool:
            if raw.lower() not in ("true", "false", "0", "1", "yes", "no", "on", "off"):
                raise ConfigInvalid(f"config key {key}: not a boolean: {raw!r}")
            cfg[key] = raw.lower() in ("true", "1", "yes", "on")
        else:
            try:
                cfg[key] = typ(raw)
            except ValueError as exc:
                raise ConfigInvalid(f"config key {key}: {exc}") from exc
    return cfg


def _fresh_config(**overrides):
    cfg = {k: default for k, (_, default, _) in CONFIG_DEFAULTS.items()}
    cfg.update(overrides)
    return cfg


class Manifest:
    """Collects one run's provenance and writes it atomically."""

    def __init__(self, command, config):
        self.data = {
            "version": __version__,
            "kernel_backend": backend_name(),
            "command_line": list(command),
            "config": config,
            "hyperparameters": {},
            "diagnostics": {},
            "outputs": {},
            "timings": {},
        }
        self._t0 = time.time()

    def hyper(self, **kw):
        self.data["hyperparameters"].update(kw)

    def diag(self, **kw):
        self.data["diagnostics"].update(kw)

    def time_stage(self, name):
        manifest = self

        class _Timer:
            def __enter__(self):
                self.t = time.time()

            def __exit__(self, *exc):
                manifest.data["timings"][name] = round(time.time() - self.t, 3)

        return _Timer()

    def output(self, path):
        self.data["outputs"][os.path.basename(path)] = _io.sha256(path)

    def write(self, path):
        self.data["timings"]["total"] = round(time.time() - self._t0, 3)
        _io.write_json(path, self.data)


def _isde_config(cfg):
    return sampler.IsdeConfig(
        f0=cfg["f0"], delta_r=cfg["delta_r"], n_burn=cfg["n_burn"],
        m0=cfg["m0"], n_mc=cfg["n_mc"], seed=cfg["seed"])


def _eps_list(cfg):
    return [float(tok) for tok in str(cfg["eps_list"]).split(",") if tok.strip()]


def _sidecar(path, tag, ext="json"):
    base, _ = os.path.splitext(path)
    return f"{base}.{tag}.{ext}"


# -- mode runners ----------------------------------------------------------------

def _run_modes(eta, cfg, man, modes):
    """Run the requested sampling modes; returns {mode: (LearnedSet, extras)}."""
    results = {}
    icfg = _isde_config(cfg)
    if "no-plom" in modes:
        with man.time_stage("no-plom"):
            ls = sampler.sample_group(eta, dmaps.identity_basis(eta.shape[1]),
                                      icfg, rng=substream(cfg["seed"], "no-plom"),
                                      reference=True)
        d2 = metrics.d2_no_group(ls.sample_mats, eta)
        man.diag(d2_no_plom=d2)
        results["no-plom"] = (ls, {"d2": d2})
    if "no-group" in modes:
        with man.time_stage("no-group-basis"):
            basis = dmaps.select_basis(eta, eps_dm=cfg["eps_dm"])
        with man.time_stage("no-group-sample"):
            ls = sampler.sample_group(eta, basis, icfg,
                                      rng=substream(cfg["seed"], "isde"))
        d2 = metrics.d2_no_group(ls.sample_mats, eta)
        man.hyper(eps_o=basis.eps_dm, m_o=basis.m)
        man.diag(d2_no_group=d2)
        results["no-group"] = (ls, {"d2": d2, "basis": basis})
    if "with-group" in modes:
        with man.time_stage("partition"):
            part = partition.select_partition(eta, tau_tol=cfg["tau_tol"])
        learned, runs = _run_with_group(eta, part, cfg, man)
        per = [(r.learned.sample_mats, eta[r.indices, :]) for r in runs]
        d2_wg, per_d2, d2_direct = metrics.d2_with_group(per)
        bounds = metrics.markov_bounds(per_d2, _eps_list(cfg))
        man.diag(d2_with_group=d2_wg, d2_with_group_direct=d2_direct,
                 per_group_d2=per_d2, r_geomean=metrics.geometric_mean(per_d2),
                 bounds=[{"eps": e, "bound": b, "display": c} for e, b, c in bounds])
        results["with-group"] = (learned, {
            "d2": d2_wg, "per_group_d2": per_d2, "partition": part, "runs": runs})
    return results


def _run_with_group(eta, part, cfg, man):
    with man.time_stage("with-group-sample"):
        learned, runs = sampler.learn_with_partition(
            eta, part, _isde_config(cfg), constraints_on=cfg["constraints"])
    man.hyper(i_ref_opt=part.i_ref_opt, groups=part.groups,
              eps_o_groups=[r.basis.eps_dm for r in runs],
              m_o_groups=[r.basis.m for r in runs],
              lambdas=[None if r.constraint is None else r.constraint.lam
                       for r in runs])
    man.diag(err_histories=[None if r.constraint is None
                            else r.constraint.err_history for r in runs],
             constraints_converged=[r.constraint is None or r.constraint.converged
                                    for r in runs])
    return learned, runs


def _all_converged(extras):
    return all(r.constraint is None or r.constraint.converged
               for r in extras.get("runs", []))


# -- subcommands ------------------------------------------------------------------

def cmd_config(args):
    print("# plom pipeline configuration (key = value, '#' comments)")
    for key, (_typ, default, help_) in CONFIG_DEFAULTS.items():
        shown = "auto" if default is None else default
        print(f"{key} = {shown}  # {help_}")
    return 0


def cmd_appgen(args):
    cfg = appgen.AppAConfig(group_dims=tuple(int(t) for t in args.group_dims.split(",")),
                            N=args.n, seed=args.seed)
    mat = appgen.generate(cfg, args.n, role=args.role)
    _io.write_matrix(args.out, mat)
    man = Manifest(sys.argv[1:], {"n": args.n, "seed": args.seed,
                                  "group_dims": list(cfg.group_dims), "role": args.role})
    man.output(args.out)
    man.write(_sidecar(args.out, "manifest"))
    return 0


def cmd_scale(args):
    data = _io.read_matrix(args.input, transpose=args.transpose)
    ts = normalize.scale_training(data, method=args.method)
    _io.write_matrix(args.out, ts.data)
    _io.write_json(_sidecar(args.out, "scaling"), {
        "method": ts.method, "offsets": ts.offsets, "factors": ts.factors})
    return 0


def cmd_pca(args):
    data = _io.read_matrix(args.input, transpose=args.transpose)
    man = Manifest(sys.argv[1:], {"eps_pca": args.eps_pca, "method": args.method})
    with man.time_stage("scale"):
        source = data if args.method == "none" else normalize.scale_training(
            data, method=args.method)
    with man.time_stage("pca"):
        model, latent = normalize.pca_reduce(source, eps_pca=args.eps_pca)
    os.makedirs(args.out_dir, exist_ok=True)
    eta_path = os.path.join(args.out_dir, "eta.csv")
    basis_path = os.path.join(args.out_dir, "pca_basis.csv")
    _io.write_matrix(eta_path, latent.eta)
    _io.write_matrix(basis_path, model.basis.T)
    _io.write_json(os.path.join(args.out_dir, "pca_model.json"), {
        "mean": model.mean, "eigvals": model.eigvals, "basis": "pca_basis.csv",
        "nu": model.nu, "eps_pca": model.eps_pca, "err_pca": model.err_pca})
    man.hyper(nu=model.nu, err_pca=model.err_pca)
    man.output(eta_path)
    man.output(basis_path)
    man.write(os.path.join(args.out_dir, "manifest.json"))
    return 0


def cmd_dmaps(args):
    eta = _io.read_matrix(args.eta)
    man = Manifest(sys.argv[1:], {"eps": args.eps})
    with man.time_stage("select"):
        basis = dmaps.select_basis(eta, eps_dm=args.eps)
    os.makedirs(args.out_dir, exist_ok=True)
    _io.write_rows(os.path.join(args.out_dir, "eigvals.csv"),
                   [(i + 1, v) for i, v in enumerate(basis.eigvals)],
                   header=("alpha", "lambda"))
    _io.write_rows(os.path.join(args.out_dir, "jump_curve.csv"),
                   basis.jump_curve, header=("eps_dm", "jump"))
    _io.write_matrix(os.path.join(args.out_dir, "dmaps_basis.csv"), basis.g)
    man.hyper(eps_o=basis.eps_dm, m_o=basis.m, jump=basis.jump_value)
    for name in ("eigvals.csv", "jump_curve.csv", "dmaps_basis.csv"):
        man.output(os.path.join(args.out_dir, name))
    man.write(os.path.join(args.out_dir, "manifest.json"))
    return 0


def cmd_partition(args):
    eta = _io.read_matrix(args.eta)
    p = partition.select_partition(eta, tau_tol=args.tau_tol)
    _io.write_json(args.out, {
        "groups": p.groups, "i_ref_opt": p.i_ref_opt, "indices_base": 0})
    if args.tau_curve:
        _io.write_rows(args.tau_curve, p.tau_curve, header=("i_ref", "tau"))
    print(f"n_p = {p.n_groups} groups, sizes {p.sizes}, i_ref_opt = {p.i_ref_opt}")
    return 0


def _pdf_curve(row, grid):
    model = kde_model(row[None, :])
    return np.exp(kde_logpdf(model, grid[None, :]))


def cmd_density(args):
    mat = _io.read_matrix(args.input)
    if args.joint:
        k1, k2 = args.joint
        pts = mat[[k1, k2], :]
        model = kde_model(pts)
        lo = pts.min(axis=1) - 3 * model.s_hat
        hi = pts.max(axis=1) + 3 * model.s_hat
        gx = np.linspace(lo[0], hi[0], args.grid)
        gy = np.linspace(lo[1], hi[1], args.grid)
        xx, yy = np.meshgrid(gx, gy, indexing="ij")
        grid = np.vstack([xx.ravel(), yy.ravel()])
        pdf = np.exp(kde_logpdf(model, grid))
        _io.write_rows(args.out, zip(grid[0], grid[1], pdf),
                       header=("x", "y", "pdf"))
    else:
        row = mat[args.component, :]
        model = kde_model(row[None, :])
        grid = np.linspace(row.min() - 3 * model.s_hat,
                           row.max() + 3 * model.s_hat, args.grid)
        _io.write_rows(args.out, zip(grid, _pdf_curve(row, grid)),
                       header=("x", "pdf"))
    return 0


def cmd_sample(args):
    eta = _io.read_matrix(args.eta)
    cfg = _fresh_config(mode=args.mode, n_mc=args.n_mc, seed=args.seed,
                        constraints=args.constraints, eps_dm=args.eps)
    man = Manifest(sys.argv[1:], {k: cfg[k] for k in
                                  ("mode", "n_mc", "seed", "constraints", "eps_dm")})
    if args.groups:
        spec = _io.read_json(args.groups)
        part = partition.Partition(groups=spec["groups"],
                                   i_ref_opt=spec.get("i_ref_opt"))
        learned, runs = _run_with_group(eta, part, cfg, man)
        extras = {"runs": runs}
    else:
        results = _run_modes(eta, cfg, man, [args.mode])
        learned, extras = results[args.mode]
    os.makedirs(args.out_dir, exist_ok=True)
    out = os.path.join(args.out_dir, "learned.csv")
    _io.write_matrix(out, learned.reshaped)
    man.output(out)
    man.write(os.path.join(args.out_dir, "manifest.json"))
    return 0 if _all_converged(extras) else EXIT_CONVERGENCE


def cmd_metrics(args):
    eta = _io.read_matrix(args.eta)
    learned = _io.read_matrix(args.learned)
    n = eta.shape[1]
    if learned.shape[1] % n:
        raise ConfigInvalid(
            f"learned set has {learned.shape[1]} realizations, not a multiple of N={n}")
    mats = [learned[:, i * n:(i + 1) * n] for i in range(learned.shape[1] // n)]
    eps_list = [float(t) for t in args.eps_list.split(",")]
    if args.groups:
        spec = _io.read_json(args.groups)
        part = partition.Partition(groups=spec["groups"])
        per = [([m[g, :] for m in mats], eta[g, :]) for g in part.groups]
        d2, per_d2, _direct = metrics.d2_with_group(per)
        report = metrics.ConcentrationReport(
            mode="with-group", d2=d2, per_group_d2=per_d2,
            r_geomean=metrics.geometric_mean(per_d2),
            bounds=metrics.markov_bounds(per_d2, eps_list))
    else:
        d2 = metrics.d2_no_group(mats, eta)
        report = metrics.ConcentrationReport(
            mode=args.mode, d2=d2, bounds=metrics.markov_bounds(d2, eps_list))
    means, stds = metrics.moment_report(learned)
    _io.write_json(args.out, report.as_dict())
    _io.write_rows(_sidecar(args.out, "moments", ext="csv"),
                   zip(range(1, len(means) + 1), means, stds),
                   header=("component", "mean", "std"))
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def cmd_pipeline(args):
    cfg = _coerce_config(_parse_config_file(args.config))
    if not cfg["input"]:
        raise ConfigInvalid("config must set 'input'")
    man = Manifest(sys.argv[1:], cfg)
    out_dir = cfg["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    data = _io.read_matrix(cfg["input"], transpose=cfg["transpose"])
    with man.time_stage("scale"):
        source = data if cfg["scale_method"] in (None, "none") else \
            normalize.scale_training(data, method=cfg["scale_method"])
    with man.time_stage("pca"):
        model, latent = normalize.pca_reduce(source, eps_pca=cfg["eps_pca"])
    man.hyper(nu=model.nu, err_pca=model.err_pca)
    eta = latent.eta
    _io.write_matrix(os.path.join(out_dir, "eta.csv"), eta)
    results = _run_modes(eta, cfg, man, [cfg["mode"]])
    learned, extras = results[cfg["mode"]]
    _io.write_matrix(os.path.join(out_dir, "learned.csv"), learned.reshaped)
    if "partition" in extras:
        _io.write_json(os.path.join(out_dir, "partition.json"),
                       {"groups": extras["partition"].groups,
                        "i_ref_opt": extras["partition"].i_ref_opt,
                        "indices_base": 0})
    means, stds = metrics.moment_report(learned.reshaped)
    _io.write_rows(os.path.join(out_dir, "moments.csv"),
                   zip(range(1, len(means) + 1), means, stds),
                   header=("component", "mean", "std"))
    for name in ("eta.csv", "learned.csv", "moments.csv"):
        man.output(os.path.join(out_dir, name))
    man.write(os.path.join(out_dir, "manifest.json"))
    return 0 if _all_converged(extras) else EXIT_CONVERGENCE


def cmd_reproduce_app1(args):
    scale = args.scale
    n_train = max(32, round(1200 * scale))
    n_ref = max(1000, round(args.n_ref * scale))
    acfg = appgen.AppAConfig(N=n_train, N_ref=n_ref, seed=args.seed)
    cfg = _fresh_config(seed=args.seed, n_mc=args.n_mc)
    man = Manifest(sys.argv[1:], {"seed": args.seed, "scale": scale,
                                  "n_mc": args.n_mc, "N": n_train, "N_ref": n_ref})
    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    with man.time_stage("appgen"):
        eta_d = appgen.generate(acfg, n_train)
        eta_ref = appgen.generate(acfg, n_ref, role="ref")
    results = _run_modes(eta_d, cfg, man, ["no-plom", "no-group", "with-group"])
    d2_np = results["no-plom"][1]["d2"]
    d2_ng = results["no-group"][1]["d2"]
    d2_wg = results["with-group"][1]["d2"]
    per_d2 = results["with-group"][1]["per_group_d2"]
    bounds = metrics.markov_bounds(per_d2, _eps_list(cfg))
    gain = metrics.gain_check(d2_wg, d2_ng)
    man.diag(gain=gain, ordering_ok=bool(d2_wg < d2_ng < d2_np))

    table = {
        "d2_no_plom": d2_np, "d2_no_group": d2_ng, "d2_with_group": d2_wg,
        "per_group_d2": per_d2, "r_geomean": metrics.geometric_mean(per_d2),
        "bounds": [{"eps": e, "bound": b, "display": c} for e, b, c in bounds],
        "gain": gain,
        "partition": results["with-group"][1]["partition"].groups,
    }
    _io.write_json(os.path.join(out_dir, "table1.json"), table)

    # pdf curves for H4..H7 and (H1,H2,H3) clouds, per data set
    sets = {"train": eta_d, "ref": eta_ref}
    for mode, (learned, _) in results.items():
        sets[mode] = learned.reshaped
    cap = 200_000
    for comp in (3, 4, 5, 6):
        lo, hi = np.percentile(sets["ref"][comp], [0.01, 99.99])
        grid = np.linspace(lo - 1.0, hi + 1.0, args.grid)
        curves = {}
        for name, mat in sets.items():
            row = mat[comp, :]
            if row.size > cap:
                row = row[:: row.size // cap + 1]
            curves[name] = _pdf_curve(row, grid)
        _io.write_rows(os.path.join(out_dir, f"pdf_H{comp + 1}.csv"),
                       zip(grid, *(curves[k] for k in sets)),
                       header=("x", *sets.keys()))
    for mode, (learned, _) in results.items():
        cloud = learned.reshaped[:3, :]
        if cloud.shape[1] > cap:
            cloud = cloud[:, :: cloud.shape[1] // cap + 1]
        _io.write_rows(os.path.join(out_dir, f"cloud_{mode}.csv"),
                       cloud.T, header=("H1", "H2", "H3"))
    for name in sorted(os.listdir(out_dir)):
        if name.endswith(".csv") or name == "table1.json":
            man.output(os.path.join(out_dir, name))
    man.write(os.path.join(out_dir, "manifest.json"))
    print(_render_table1(table))
    return 0


def _render_table1(table):
    lines = [
        "Concentration of the probability measure",
        "----------------------------------------",
        f"  No PLoM         d2 = {table['d2_no_plom']:.3f}",
        f"  No-Group PLoM   d2 = {table['d2_no_group']:.3f}",
        f"  With-Group PLoM d2 = {table['d2_with_group']:.4f}",
        f"  per-group d2: {['%.4f' % v for v in table['per_group_d2']]}",
    ]
    for b in table["bounds"]:
        lines.append(f"  Proba bound at eps={b['eps']:.2f}: <= {b['display']:.2g}"
                     f" (raw {b['bound']:.3g})")
    lines.append(f"  gain (with-group < no-group): {table['gain']}")
    return "\n".join(lines) + "\n"


# -- parser ------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="plom",
        description="Probabilistic learning on manifolds with partition")
    ap.add_argument("--version", action="version", version=f"plom {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("config", help="print the pipeline config schema")
    p.add_argument("--defaults", action="store_true", help="show default values")
    p.set_defaults(func=cmd_config)

    p = sub.add_parser("appgen", help="generate the synthetic 3-group training set")
    p.add_argument("--n", type=int, default=1200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--group-dims", default="10,20,30")
    p.add_argument("--role", default="train", choices=("train", "ref"),
                   help="independent draw stream for reference sets")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_appgen)

    p = sub.add_parser("scale", help="scale features into a comparable range")
    p.add_argument("--input", required=True)
    p.add_argument("--method", default="min-max", choices=("min-max", "standardize"))
    p.add_argument("--transpose", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("pca", help="scale + PCA to the normalized latent set")
    p.add_argument("--input", required=True)
    p.add_argument("--method", default="min-max",
                   choices=("min-max", "standardize", "none"))
    p.add_argument("--eps-pca", type=float, default=1e-3)
    p.add_argument("--transpose", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("dmaps", help="diffusion-map basis selection")
    p.add_argument("--eta", required=True)
    p.add_argument("--eps", type=float, default=None,
                   help="kernel width override (skips the search)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_dmaps)

    p = sub.add_parser("partition", help="independent-group partition")
    p.add_argument("--eta", required=True)
    p.add_argument("--tau-tol", type=float, default=partition.TAU_TOL)
    p.add_argument("--out", required=True)
    p.add_argument("--tau-curve", default=None, help="also write the tau curve CSV")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("density", help="1-D pdf curve or 2-D joint pdf grid")
    p.add_argument("--input", required=True)
    p.add_argument("--component", type=int, default=0)
    p.add_argument("--joint", type=int, nargs=2, metavar=("K1", "K2"))
    p.add_argument("--grid", type=int, default=400)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("sample", help="generate a learned set")
    p.add_argument("--eta", required=True)
    p.add_argument("--groups", default=None, help="partition JSON (with-group mode)")
    p.add_argument("--mode", default="no-group",
                   choices=("no-plom", "no-group", "with-group"))
    p.add_argument("--constraints", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--n-mc", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("metrics", help="concentration diagnostics for a learned set")
    p.add_argument("--eta", required=True)
    p.add_argument("--learned", required=True)
    p.add_argument("--groups", default=None)
    p.add_argument("--mode", default="no-group")
    p.add_argument("--eps-list", default="0.05,0.1")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("pipeline", help="full run from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("reproduce-app1", help="synthetic 3-group benchmark report")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0,
                   help="training-size factor (1.0 = N=1200)")
    p.add_argument("--n-mc", type=int, default=50)
    p.add_argument("--n-ref", type=int, default=100_000)
    p.add_argument("--grid", type=int, default=400)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_reproduce_app1)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigInvalid as exc:
        print(f"plom {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoConvergence as exc:
        print(f"plom {args.command}: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except NumericError as exc:
        print(f"plom {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PlomError as exc:
        print(f"plom {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"plom {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
