"""Experiment runner: JSON config in, deterministic manifest + CSVs out.

Usage:
    lgtlab <scenario> --config cfg.json [--out DIR] [--threads N]
                      [--tolerance TOL]
    lgtlab verify --all [--out DIR]

Scenarios: spectrum, potential, plaquette_convergence, effective_check,
dynamics, verify, channels.

Exit codes: 0 = success, 1 = invariant violation, 2 = config error,
3 = numerical failure.  Result CSVs are byte-stable across repeated runs
(fixed solver seeds, floats printed with 17 significant digits, LF line
endings); the manifest additionally records the wall time.
"""

import argparse
import json
import os
import sys
import time

import numpy as np
import scipy

from . import __version__, atommap, gauge, observables, solver
from .hamiltonian import HamiltonianSpec, build_model, max_gauss_violation, \
    h_electric, h_magnetic, h_microscopic_hopping, h_penalty
from .lattice import build_lattice
from .matter import STAGGERED, NAIVE2D, SU2_FUNDAMENTAL

SCENARIOS = ("spectrum", "potential", "plaquette_convergence",
             "effective_check", "dynamics", "verify", "channels")

DEFAULT_TOL = 1e-10


class ConfigError(ValueError):
    pass


def _fmt(x):
    """Fixed float formatting: 17 significant digits."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _require_keys(d, allowed, required=(), where="config"):
    unknown = set(d) - set(allowed)
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in {where}; "
            f"allowed: {sorted(allowed)}")
    missing = set(required) - set(d)
    if missing:
        raise ConfigError(f"missing key(s) {sorted(missing)} in {where}")


def parse_lattice(cfg):
    _require_keys(cfg, ("spatial_dim", "sizes", "boundary"),
                  ("spatial_dim", "sizes"), "lattice")
    dim = cfg["spatial_dim"]
    if dim not in (1, 2):
        raise ConfigError(f"lattice.spatial_dim must be 1 or 2, got {dim}")
    try:
        return build_lattice(dim, cfg["sizes"], cfg.get("boundary", "open"))
    except ValueError as exc:
        raise ConfigError(f"lattice: {exc}") from exc


_HKEYS = ("model", "truncation", "g2", "eps", "mass", "lam", "lam_zn",
          "eta", "matter", "terms")


def parse_hamiltonian(cfg):
    _require_keys(cfg, _HKEYS, ("model",), "hamiltonian")
    kwargs = dict(cfg)
    if "terms" in kwargs and kwargs["terms"] is not None:
        kwargs["terms"] = tuple(kwargs["terms"])
    try:
        return HamiltonianSpec(**kwargs).validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"hamiltonian: {exc}") from exc


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _require_keys(cfg, ("scenario", "lattice", "hamiltonian", "params",
                        "tolerance"), ("scenario",), "config")
    if cfg["scenario"] not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario {cfg['scenario']!r}; pick from {SCENARIOS}")
    return cfg


class Writer:
    def __init__(self, outdir):
        self.outdir = outdir
        os.makedirs(outdir, exist_ok=True)
        self.files = []

    def csv(self, name, header, rows):
        path = os.path.join(self.outdir, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(x) if not isinstance(x, str) else x
                                  for x in row) + "\n")
        self.files.append(name)
        return path

    def manifest(self, payload):
        path = os.path.join(self.outdir, "manifest.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _check(name, value, threshold, larger_is_bad=True):
    ok = bool(value < threshold) if larger_is_bad else bool(value > threshold)
    return {"name": name, "value": float(value), "threshold": float(threshold),
            "pass": ok}


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

def run_spectrum(cfg, writer, tol):
    params = cfg.get("params", {})
    _require_keys(params, ("k", "charges", "export_sector"), (), "params")
    lat = parse_lattice(cfg.get("lattice", {}))
    spec = parse_hamiltonian(cfg.get("hamiltonian", {}))
    model = build_model(spec, lat)
    h = model.hamiltonian()
    k = int(params.get("k", 4))
    charges = params.get("charges")
    checks = [_check("gauge_invariance", max_gauss_violation(model, h), tol)]
    results = {"dim_full": model.space.dim}
    if charges is not None:
        if spec.model == "su2":
            raise ConfigError("charged spectrum sectors are Abelian-only")
        sec = gauge.sector_basis(model.space, charges,
                                 modular=(spec.model == "zn"))
        if sec.is_empty:
            raise solver.SolverError(f"empty Gauss sector {tuple(charges)}")
        results["sector_dim"] = sec.dim
        if params.get("export_sector"):
            results["sector_indices"] = [int(i) for i in sec.indices]
        h = solver.restrict(h, sec)
    k = min(k, h.shape[0])
    w, _ = solver.eigs(h, k)
    writer.csv("spectrum.csv", ["index", "energy"],
               [(i, w[i]) for i in range(len(w))])
    results["ground_energy"] = float(w[0])
    return results, checks


def run_potential(cfg, writer, tol):
    params = cfg.get("params", {})
    _require_keys(params, ("separations", "origin"), ("separations",),
                  "params")
    lat = parse_lattice(cfg.get("lattice", {}))
    spec = parse_hamiltonian(cfg.get("hamiltonian", {}))
    curve = observables.static_potential(
        spec, lat, list(params["separations"]),
        origin=int(params.get("origin", 0)))
    writer.csv("potential.csv", ["R", "E", "dim"],
               list(zip(curve.separations, curve.energies, curve.dimensions)))
    results = {"sigma": curve.sigma, "offset": curve.offset,
               "fit_residual": curve.residual}
    checks = []
    if spec.terms == ("electric",):
        c2 = 0.75 if spec.model == "su2" else 1.0
        checks.append(_check("string_tension_electric_only",
                             abs(curve.sigma - spec.g2 / 2.0 * c2), tol))
    return results, checks


def run_plaquette_convergence(cfg, writer, tol):
    params = cfg.get("params", {})
    _require_keys(params, ("family", "g2_list", "ell_list", "n_list",
                           "cutoff_ref"), (), "params")
    family = params.get("family", "spin_gauge")
    cutoff_ref = int(params.get("cutoff_ref", 8))
    checks = []
    if family == "spin_gauge":
        g2_list = [float(x) for x in params.get("g2_list", [0.5, 1.0, 2.0])]
        ell_list = [int(x) for x in params.get("ell_list", [1, 2, 3])]
        rows, refs = observables.plaquette_convergence_study(
            g2_list, ell_list, cutoff_ref)
        writer.csv("convergence.csv", ["g2", "ell", "E", "gap_to_ref"], rows)
        results = {"reference": {str(k): v for k, v in refs.items()}}
        for g2 in g2_list:
            gaps = [r[3] for r in rows if r[0] == g2]
            mono = all(gaps[i] > gaps[i + 1] for i in range(len(gaps) - 1))
            checks.append(_check(f"monotone_convergence_g2_{g2}",
                                 0.0 if mono else 1.0, 0.5))
    elif family == "zn":
        n_list = [int(x) for x in params.get("n_list", [3, 5, 7, 9])]
        g2 = float(params.get("g2_list", [1.0])[0])
        rows, ref = observables.zn_convergence_study(n_list, g2, cutoff_ref)
        writer.csv("convergence.csv", ["N", "E_calibrated", "gap_to_ref"],
                   rows)
        results = {"reference": ref}
        gaps = [r[2] for r in rows]
        mono = all(gaps[i] > gaps[i + 1] for i in range(len(gaps) - 1))
        checks.append(_check("monotone_convergence_zn",
                             0.0 if mono else 1.0, 0.5))
    else:
        raise ConfigError(f"unknown convergence family {family!r}")
    return results, checks


def run_effective_check(cfg, writer, tol):
    params = cfg.get("params", {})
    _require_keys(params, ("lam", "eta", "ell", "g2", "k"), (), "params")
    lam = float(params.get("lam", 40.0))
    eta = float(params.get("eta", 0.1))
    ell = int(params.get("ell", 1))
    g2 = float(params.get("g2", 1.0))
    k = int(params.get("k", 3))
    lat = build_lattice(2, [2, 2])

    rows = []
    reports = {}
    for scale in (1.0, 2.0, 4.0):
        lam_s = lam * scale
        spec = HamiltonianSpec(model="spin_gauge", truncation=ell, g2=g2,
                               lam=lam_s, eta=eta)
        model = build_model(spec, lat)
        pen = h_penalty(model)
        V = h_microscopic_hopping(model)
        He = h_electric(model)
        pattern = -(2.0 * g2) * h_magnetic(model)
        sec = gauge.sector_basis(model.space, [0] * 4)
        rep = solver.effective_second_order(pen, V, sec, rest=He,
                                            pattern=pattern)
        kk = min(k, sec.dim)
        w_eff, _ = solver.eigs(rep.h_eff, kk)
        w_exact, _ = solver.eigs(He + pen + V, kk)
        mismatch = float(np.max(np.abs(w_eff - w_exact[:kk])))
        rows.append((lam_s, rep.pattern_coefficient.real, mismatch,
                     rep.pattern_remainder))
        reports[scale] = rep
    writer.csv("effective.csv",
               ["lambda", "plaquette_coefficient", "low_spectrum_mismatch",
                "non_plaquette_remainder"], rows)
    ratio = rows[0][1] / rows[1][1]
    shrink = rows[0][2] / rows[2][2] if rows[2][2] > 0 else np.inf
    results = {"coefficient_ratio_lam_2lam": ratio,
               "mismatch_shrink_lam_4lam": shrink}
    checks = [
        _check("coefficient_halves_with_doubled_lambda", abs(ratio - 2.0),
               2e-3),
        _check("mismatch_shrinks_8x_when_lambda_quadrupled", shrink, 8.0,
               larger_is_bad=False),
    ]
    return results, checks


def run_dynamics(cfg, writer, tol):
    params = cfg.get("params", {})
    _require_keys(params, ("separation", "t_final", "steps", "origin"),
                  ("separation", "t_final", "steps"), "params")
    lat = parse_lattice(cfg.get("lattice", {}))
    spec = parse_hamiltonian(cfg.get("hamiltonian", {}))
    report, model, traj = observables.flux_tube_breaking_scenario(
        spec, lat, int(params["separation"]), float(params["t_final"]),
        int(params["steps"]), origin=int(params.get("origin", 0)))

    rows = []
    for i, t in enumerate(report.times):
        for l in range(model.space.n_links):
            origin_vertex = model.lattice.links[l][0]
            rows.append((t, l, report.flux[i, l],
                         report.charge[i, origin_vertex]))
    writer.csv("dynamics.csv", ["t", "link", "flux", "charge_density"], rows)
    writer.csv("dynamics_charge.csv", ["t", "vertex", "charge"],
               [(t, v, report.charge[i, v])
                for i, t in enumerate(report.times)
                for v in range(lat.vertex_count)])
    cons_tol = 1e-8
    checks = [
        _check("norm_conservation", report.max_norm_drift, cons_tol),
        _check("energy_conservation", report.max_energy_drift, cons_tol),
        _check("total_charge_conservation", report.max_charge_drift,
               cons_tol),
        _check("gauss_expectation_conservation", report.gauss_drift,
               cons_tol),
    ]
    results = {"final_flux_profile": [float(x) for x in report.flux[-1]],
               "string_survival":
                   float(report.flux[-1].sum() / max(report.flux[0].sum(),
                                                     1e-12))}
    return results, checks


def run_channels(cfg, writer, tol):
    params = cfg.get("params", {})
    _require_keys(params, ("omega1", "omega2", "couplings"), (), "params")
    omega1 = float(params.get("omega1", 1.0))
    omega2 = float(params.get("omega2", 2.2))
    couplings = params.get("couplings")
    if couplings is None:
        couplings = {f: 1.0 for f in atommap.total_f_channels()}
    else:
        couplings = {float(k): float(v) for k, v in couplings.items()}
    scheme = atommap.HyperfineLevelScheme(omega1, omega2)
    rows = []
    for parity in ("even", "odd"):
        allowed = {(c["m_b_in"], c["m_f_in"], c["m_b_out"], c["m_f_out"])
                   for c in atommap.enumerate_channels(scheme, parity)}
        src = atommap.M_F_ODD if parity == "even" else atommap.M_F_EVEN
        dst = atommap.M_F_EVEN if parity == "even" else atommap.M_F_ODD
        for m_b in range(-2, 3):
            for m_f in src.values():
                for m_b_p in range(-2, 3):
                    for m_f_p in dst.values():
                        amp = atommap.scattering_matrix_element(
                            m_b_p, m_f_p, m_b, m_f, couplings)
                        key = (m_b, m_f, m_b_p, m_f_p)
                        rows.append((m_b, m_f, m_b_p, m_f_p,
                                     complex(amp).real, complex(amp).imag,
                                     1 if key in allowed else 0))
    writer.csv("channels.csv",
               ["m_b", "m_f", "m_b_prime", "m_f_prime", "amplitude_re",
                "amplitude_im", "allowed_by_homega"], rows)
    _, dev_even = atommap.build_m_and_verify("even")
    _, dev_odd = atommap.build_m_and_verify("odd")
    checks = [
        _check("link_matrix_equals_rotation_matrix_even", dev_even, 1e-12),
        _check("link_matrix_equals_rotation_matrix_odd", dev_odd, 1e-12),
    ]
    return {"n_channels": len(rows)}, checks


def _verify_one(name, spec, lat, tol, checks):
    model = build_model(spec, lat)
    h = model.hamiltonian()
    herm = abs(h - h.conj().T)
    herm = 0.0 if herm.nnz == 0 else float(np.max(herm.data))
    checks.append(_check(f"hermiticity[{name}]", herm, 1e-12))
    checks.append(_check(f"gauge_invariance[{name}]",
                         max_gauss_violation(model, h), tol))
    return model, h


def run_verify(cfg, writer, tol):
    """Invariant suite for one configured model (or the built-in set)."""
    checks = []
    results = {}
    if cfg.get("lattice") and cfg.get("hamiltonian"):
        lat = parse_lattice(cfg["lattice"])
        spec = parse_hamiltonian(cfg["hamiltonian"])
        _verify_one(spec.model, spec, lat, tol, checks)
        return results, checks
    return run_verify_all(tol, checks, results)


def run_verify_all(tol, checks, results):
    chain = build_lattice(1, [4])
    plaq = build_lattice(2, [2, 2])
    suite = [
        ("u1_chain_matter", HamiltonianSpec(
            model="ks_u1", truncation=1, eps=0.5, mass=0.3,
            matter=STAGGERED), chain),
        ("u1_plaquette", HamiltonianSpec(model="ks_u1", truncation=1), plaq),
        ("spin_gauge_plaquette", HamiltonianSpec(
            model="spin_gauge", truncation=2), plaq),
        ("spin_gauge_naive", HamiltonianSpec(
            model="spin_gauge", truncation=1, eps=0.4, mass=0.2,
            matter=NAIVE2D), plaq),
        ("zn_plaquette", HamiltonianSpec(model="zn", truncation=3), plaq),
        ("su2_chain_matter", HamiltonianSpec(
            model="su2", truncation=0.5, eps=0.4, mass=0.2,
            matter=SU2_FUNDAMENTAL), chain),
    ]
    for name, spec, lat in suite:
        model, h = _verify_one(name, spec, lat, tol, checks)
        if spec.model == "ks_u1" and lat is plaq:
            dims = gauge.all_sector_dimensions(model.space)
            total = sum(dims.values())
            checks.append(_check("sector_dimensions_sum[u1_plaquette]",
                                 abs(total - model.space.dim), 0.5))
    # truncated-SU(2) trace identity with a measured defect scalar
    import lgtlab.su2rep as su2rep
    sp = su2rep.su2_link_space(0.5)
    rot = su2rep.truncated_rotation_matrix(sp, 0.5)
    f, residual = rot.measured_defect()
    results["trace_identity_defect_f"] = f
    checks.append(_check("trace_identity_residual", residual, 1e-12))
    _, dev_even = atommap.build_m_and_verify("even")
    _, dev_odd = atommap.build_m_and_verify("odd")
    checks.append(_check("m_equals_u_even", dev_even, 1e-12))
    checks.append(_check("mdag_equals_u_odd", dev_odd, 1e-12))
    sch = atommap.schwinger_interaction_check(3)
    checks.append(_check("schwinger_interaction_identity",
                         sch["deviation"], 1e-12))
    p = atommap.f1_projectors()
    checks.append(_check("f1_projector_traces",
                         abs(np.trace(p["P0"]).real - 1.0)
                         + abs(np.trace(p["P2"]).real - 5.0), 1e-10))
    return results, checks


RUNNERS = {
    "spectrum": run_spectrum,
    "potential": run_potential,
    "plaquette_convergence": run_plaquette_convergence,
    "effective_check": run_effective_check,
    "dynamics": run_dynamics,
    "verify": run_verify,
    "channels": run_channels,
}


def run(cfg, outdir, tol=DEFAULT_TOL):
    """Execute a parsed config; returns (exit_code, manifest_path)."""
    writer = Writer(outdir)
    t0 = time.perf_counter()
    scenario = cfg["scenario"]
    try:
        results, checks = RUNNERS[scenario](cfg, writer, tol)
        status = 0 if all(c["pass"] for c in checks) else 1
        error = None
    except ConfigError as exc:
        results, checks, status, error = {}, [], 2, str(exc)
    except solver.SolverError as exc:
        results, checks, status, error = {}, [], 3, str(exc)
    manifest = {
        "config": cfg,
        "versions": {"lgtlab": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__},
        "results": results,
        "checks": checks,
        "files": writer.files,
        "error": error,
        "exit_status": status,
        "timing": {"wall_seconds": time.perf_counter() - t0},
    }
    path = writer.manifest(manifest)
    return status, path


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="lgtlab",
        description="lattice gauge theory laboratory runner")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (falls back to LGTLAB_THREADS)")
        p.add_argument("--tolerance", type=float, default=None,
                       help="override the default invariant tolerance")
        if name == "verify":
            p.add_argument("--all", action="store_true",
                           help="run the full built-in invariant suite")
    args = parser.parse_args(argv)

    threads = args.threads
    if threads is None and os.environ.get("LGTLAB_THREADS"):
        threads = int(os.environ["LGTLAB_THREADS"])
    if threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(threads)

    try:
        if args.scenario == "verify" and getattr(args, "all", False):
            cfg = {"scenario": "verify"}
        else:
            if not args.config:
                print("error: --config is required", file=sys.stderr)
                return 2
            cfg = load_config(args.config)
            if cfg["scenario"] != args.scenario:
                raise ConfigError(
                    f"config names scenario {cfg['scenario']!r} but the "
                    f"{args.scenario!r} subcommand was invoked")
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    outdir = args.out or "lgtlab_out"
    tol = args.tolerance
    if tol is None:
        tol = cfg.get("tolerance", DEFAULT_TOL)
    status, manifest = run(cfg, outdir, tol)
    print(f"manifest: {manifest} (exit {status})")
    return status


if __name__ == "__main__":
    sys.exit(main())
