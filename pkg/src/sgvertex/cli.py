"""Command-line front end: reproducible runs with structured outputs.

Subcommands
-----------
check       invariant suites (vertex algebra, commutation, Hamiltonian
            reconciliation, decoupled limit, kernels, first-order
            amplitude); exit code 0 iff every suite passes
diag        build and diagonalize one sector Hamiltonian, export spectrum
bethe       solve the root equations for one sector, export the state
dispersion  hole curve at finite L vs the closed-form dispersion
vacuum      vacuum-energy quadrature and its singular content
scan        mass or energy power-law scan over a theta grid, with fit

Every run writes one output directory holding report.json (the index)
plus CSV artifacts, each embedding the config hash.  Identical config and
seed give byte-identical outputs.  CSV schemas are described in
docs/FORMATS.md and under each subcommand's --help.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .basis import SectorBasis
from .bethe import (
    energy_momentum,
    enumerate_real_states,
    estimate_gap_from_samples,
    hole_dispersion_samples,
    lattice_energy,
    phi,
    phi_prime,
    scattering_theta,
    scattering_theta_prime,
    solve_ground_state,
)
from .continuum import (
    ContinuumConstants,
    hole_dispersion_continuum,
    pole_coefficient,
    pole_coefficient_residue,
    soliton_mass,
    sound_velocity,
    vacuum_energy_integral,
    vacuum_energy_singular,
)
from .errors import SGVertexError
from .hamiltonian import (
    decoupled_spectrum_union,
    hamiltonian_h0,
    hamiltonian_local,
    hamiltonian_logderiv,
    interaction_first_order,
    reconcile,
)
from .io import config_hash, dump_csv, dump_json, operator_to_files
from .params import ModelParams
from .scaling import energy_scan, mass_scan, power_law_fit, predicted_exponents
from .smatrix import yang_baxter_residual
from .spectra import diagonalize, translation_labels
from .transfer import transfer_matrix

SECTOR_DIM_CAP = 20000


# ---------------------------------------------------------------------------
# configuration


def read_config_file(path: str) -> dict:
    """Flat key=value text file; blank lines and '#' comments ignored."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key] = val
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sgvertex",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file; flags override it")
        p.add_argument("--eta", type=float, default=2 * math.pi / 5)
        p.add_argument("--theta", type=float, default=1.0)
        p.add_argument("--L", type=int, default=8)
        p.add_argument("--M", type=int, default=None, help="sector (default L/2)")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--out", default="run_out", help="output directory")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--seed", type=int, default=1234)

    p = sub.add_parser("check", help="run the invariant suites")
    common(p)

    p = sub.add_parser("diag", help="diagonalize one sector Hamiltonian")
    common(p)
    p.add_argument("--builder", choices=["logderiv", "local", "h0"], default="logderiv")
    p.add_argument(
        "--labels", action="store_true", help="attach two-site translation labels"
    )

    p = sub.add_parser("bethe", help="solve the root equations")
    common(p)
    p.add_argument(
        "--all-states", action="store_true",
        help="enumerate every converged real-root state of the sector",
    )

    p = sub.add_parser("dispersion", help="finite-L hole curve vs closed form")
    common(p)

    p = sub.add_parser("vacuum", help="vacuum energy quadrature and pole content")
    common(p)

    p = sub.add_parser("scan", help="power-law scan over a theta grid")
    common(p)
    p.add_argument("--observable", choices=["mass", "energy"], default="mass")
    p.add_argument(
        "--theta-grid", default="4:8:9",
        help="grid as start:stop:npoints (inclusive)",
    )
    p.add_argument(
        "--source", choices=["continuum", "BA"], default="continuum",
        help="mass scan source; BA solves at the configured L",
    )
    return ap


def merge_config(args: argparse.Namespace, defaults: argparse.Namespace) -> dict:
    """File values fill in only where flags were left at their defaults."""
    cfg = vars(args).copy()
    if args.config:
        file_cfg = read_config_file(args.config)
        for key, raw in file_cfg.items():
            if key not in cfg:
                raise ValueError(f"unknown config key {key!r}")
            if getattr(args, key) == getattr(defaults, key):
                current = getattr(defaults, key)
                if isinstance(current, bool):
                    cfg[key] = raw.lower() in ("1", "true", "yes")
                elif isinstance(current, int):
                    cfg[key] = int(raw)
                elif isinstance(current, float):
                    cfg[key] = float(raw)
                else:
                    cfg[key] = raw
    cfg.pop("config", None)
    return cfg


def _params(cfg: dict) -> ModelParams:
    M = cfg.get("M")
    if M is None:
        M = cfg["L"] // 2
    return ModelParams(eta=cfg["eta"], theta=cfg["theta"], L=cfg["L"], M=M)


def _guard_dimension(L: int, M: int) -> None:
    dim = math.comb(L, M)
    if dim > SECTOR_DIM_CAP:
        raise SGVertexError(
            f"sector dimension {dim} exceeds cap {SECTOR_DIM_CAP}; refusing allocation"
        )


def _theta_grid(spec: str) -> np.ndarray:
    start, stop, n = spec.split(":")
    return np.linspace(float(start), float(stop), int(n))


# ---------------------------------------------------------------------------
# check suites


def _suite_yang_baxter(cfg: dict) -> dict:
    rng = np.random.default_rng(cfg["seed"])
    worst = 0.0
    for _ in range(100):
        t1, t2 = rng.uniform(-2.0, 2.0, 2)
        eta = rng.uniform(0.05, math.pi - 0.05)
        worst = max(worst, yang_baxter_residual(t1, t2, eta))
    return {"residual": worst, "tol": 1e-11, "passed": worst <= 1e-11}


def _suite_commutation(cfg: dict) -> dict:
    rng = np.random.default_rng(cfg["seed"] + 1)
    p = ModelParams(eta=cfg["eta"], theta=cfg["theta"], L=6, M=3)
    worst = 0.0
    for M in range(7):
        t1, t2 = rng.uniform(-1.5, 1.5, 2)
        z1 = transfer_matrix(t1, p, M)
        z2 = transfer_matrix(t2, p, M)
        worst = max(worst, z1.commutator_norm(z2))
    return {"residual": worst, "tol": 1e-10, "passed": worst <= 1e-10}


def _suite_reconciliation(cfg: dict) -> dict:
    worst = 0.0
    sigmas = []
    for eta in (0.5, 2 * math.pi / 5, 2.0):
        for theta in (0.5, 2.0):
            p = ModelParams(eta=eta, theta=theta, L=6, M=3)
            s, c, r = reconcile(hamiltonian_local(p), hamiltonian_logderiv(p), tol=1e-9)
            worst = max(worst, r)
            sigmas.append(s)
    spread = max(sigmas) - min(sigmas)
    return {
        "residual": worst,
        "sigma": sigmas[0],
        "sigma_spread": spread,
        "tol": 1e-9,
        "passed": worst <= 1e-9 and spread <= 1e-9,
    }


def _suite_hermiticity(cfg: dict) -> dict:
    worst = 0.0
    for eta in (0.5, math.pi / 2, 2.0):
        for theta in (0.5, 2.0):
            for L in (4, 6):
                p = ModelParams(eta=eta, theta=theta, L=L, M=L // 2)
                h = hamiltonian_logderiv(p, check_hermiticity=False)
                worst = max(worst, h.hermiticity_residual())
    return {"residual": worst, "tol": 1e-10, "passed": worst <= 1e-10}


def _suite_decoupled_limit(cfg: dict) -> dict:
    p8 = ModelParams(eta=cfg["eta"], theta=cfg["theta"], L=8, M=4)
    h0 = hamiltonian_h0(p8)
    union = decoupled_spectrum_union(p8)
    ev = np.sort(np.linalg.eigvalsh(h0.matrix))
    spec_err = float(np.max(np.abs(ev - union)))
    p12 = ModelParams(eta=cfg["eta"], theta=12.0, L=6, M=3)
    h = hamiltonian_local(p12)
    h0_6 = hamiltonian_h0(p12)
    lim_err = float(
        np.linalg.norm(h.matrix - h0_6.matrix) / np.linalg.norm(h0_6.matrix)
    )
    return {
        "spectrum_union_residual": spec_err,
        "limit_residual": lim_err,
        "tol": 1e-10,
        "passed": spec_err <= 1e-10 and lim_err <= 1e-4,
    }


def _suite_kernels(cfg: dict) -> dict:
    eta = cfg["eta"]
    ts = np.linspace(-8, 8, 41)
    d = 1e-6
    fd = (phi(ts + d, eta) - phi(ts - d, eta)) / (2 * d)
    err_phi = float(np.max(np.abs(fd - phi_prime(ts, eta))))
    fd2 = (scattering_theta(ts + d, eta) - scattering_theta(ts - d, eta)) / (2 * d)
    err_th = float(np.max(np.abs(fd2 - scattering_theta_prime(ts, eta))))
    odd = float(np.max(np.abs(phi(ts, eta) + phi(-ts, eta))))
    asym = abs(phi(60.0, eta) - (math.pi - eta))
    ident = 0.0
    for e in np.linspace(0.05, math.pi - 0.05, 50):
        c = ContinuumConstants(e)
        ident = max(ident, abs(1.0 / (2.0 - c.xi) - math.pi / (2 * e)))
        ident = max(ident, abs(c.beta_sq - 4 * math.pi * c.xi))
    ok = err_phi < 1e-8 and err_th < 1e-8 and odd < 1e-12 and asym < 1e-10 and ident < 1e-12
    return {
        "phi_prime_fd": err_phi,
        "theta_prime_fd": err_th,
        "oddness": odd,
        "asymptote": asym,
        "identities": ident,
        "passed": bool(ok),
    }


def _suite_first_order(cfg: dict) -> dict:
    eta = cfg["eta"]
    L, M = 6, 3
    p1 = ModelParams(eta=eta, theta=1.0, L=L, M=M)
    h0 = hamiltonian_h0(p1)
    thetas = [10.0, 12.0, 14.0]
    hs = np.exp([-t for t in thetas])
    mats = [
        hamiltonian_local(ModelParams(eta=eta, theta=t, L=L, M=M)).matrix - h0.matrix
        for t in thetas
    ]
    design = np.column_stack([hs, hs**2, hs**3])
    coef = np.linalg.solve(design, np.array([m.ravel() for m in mats]))
    deriv = coef[0].reshape(mats[0].shape)
    sigma, _, _ = reconcile(
        hamiltonian_local(p1), hamiltonian_logderiv(p1), tol=1e-6
    )
    amp = 2.0 * math.sin(eta) ** 2
    basis = h0.basis
    worst = 0.0
    n_clean = 0
    dressed = 0.0
    for r in range(basis.dim):
        for c in range(basis.dim):
            val = deriv[r, c] / sigma
            if abs(val) < 1e-8:
                continue
            sr, sc = basis.states[r], basis.states[c]
            bits = [i for i in range(L) if ((sr ^ sc) >> i) & 1]
            if len(bits) != 2:
                continue
            i, j = bits
            if (j - i) % L not in (1, L - 1):
                continue
            lo = i if (j - i) % L == 1 else j
            hi = (lo + 1) % L
            nl = (sc >> ((lo - 1) % L)) & 1
            nr = (sc >> ((hi + 1) % L)) & 1
            if nl == nr:
                worst = max(worst, abs(abs(val) - amp) / amp)
                n_clean += 1
            else:
                dressed = max(dressed, abs(val - amp))
    return {
        "amplitude_residual": worst,
        "n_clean_elements": n_clean,
        "dressed_content": dressed,
        "tol": 1e-6,
        "passed": n_clean > 0 and worst <= 1e-6,
    }


CHECK_SUITES = {
    "yang_baxter": _suite_yang_baxter,
    "transfer_commutation": _suite_commutation,
    "reconciliation": _suite_reconciliation,
    "hermiticity": _suite_hermiticity,
    "decoupled_limit": _suite_decoupled_limit,
    "kernels": _suite_kernels,
    "first_order_amplitude": _suite_first_order,
}


# ---------------------------------------------------------------------------
# subcommand handlers


def _prepare_out(cfg: dict) -> tuple[Path, dict]:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    # output location and worker count steer scheduling, not results;
    # keeping them out of the report makes reruns byte-comparable
    hashed = {k: v for k, v in cfg.items() if k not in ("out", "workers")}
    meta = {
        "version": __version__,
        "config": {k: v for k, v in sorted(hashed.items())},
        "config_hash": config_hash(hashed),
    }
    return out, meta


def cmd_check(cfg: dict) -> int:
    out, meta = _prepare_out(cfg)
    results = {}
    for name, suite in CHECK_SUITES.items():
        results[name] = suite(cfg)
    ok = all(r["passed"] for r in results.values())
    dump_json(out / "report.json", {**meta, "suites": results, "passed": ok})
    for name, r in results.items():
        print(f"[{'PASS' if r['passed'] else 'FAIL'}] {name}: "
              + ", ".join(f"{k}={v:.3e}" for k, v in r.items()
                          if isinstance(v, float)))
    return 0 if ok else 1


def cmd_diag(cfg: dict) -> int:
    out, meta = _prepare_out(cfg)
    params = _params(cfg)
    _guard_dimension(params.L, params.M)
    builder = {
        "logderiv": hamiltonian_logderiv,
        "local": hamiltonian_local,
        "h0": hamiltonian_h0,
    }[cfg["builder"]]
    op = builder(params)
    sigma, shift, _ = reconcile(
        hamiltonian_local(params), hamiltonian_logderiv(params), tol=1e-6
    )
    spectrum = diagonalize(op, params=params)
    if cfg["labels"]:
        spectrum = translation_labels(spectrum, params)
    files = operator_to_files(
        op, out / "operator", params.as_dict(),
        convention={"sigma": sigma, "shift": shift}, tol=1e-14,
    )
    rows = []
    labels = spectrum.momentum_labels
    for k, ev in enumerate(spectrum.eigenvalues):
        lab = labels[k] if labels is not None else 0.0
        rows.append([k, float(np.real(ev)), float(np.imag(ev)),
                     float(np.real(lab)), float(np.imag(lab))])
    dump_csv(out / "spectrum.csv",
             ["level", "energy_re", "energy_im", "label_re", "label_im"], rows)
    dump_json(out / "report.json", {
        **meta,
        "spectrum": spectrum.as_dict(),
        "operator_files": files,
        "hermiticity_residual": op.hermiticity_residual(),
    })
    print(f"ground energy: {spectrum.ground_energy!r} (dim {op.dim})")
    return 0


def cmd_bethe(cfg: dict) -> int:
    out, meta = _prepare_out(cfg)
    params = _params(cfg)
    if cfg["all_states"]:
        states = enumerate_real_states(params)
    else:
        states = [solve_ground_state(params)]
    payload = []
    for st in states:
        e, p_tot = energy_momentum(st)
        payload.append({
            **st.as_dict(),
            "root_sum_energy": e,
            "momentum": p_tot,
            "lattice_energy": lattice_energy(st),
        })
    dump_json(out / "report.json", {**meta, "states": payload})
    if payload:
        print(f"{len(payload)} state(s); first residual {states[0].residual:.3e}")
    else:
        print("no converged states")
    return 0


def cmd_dispersion(cfg: dict) -> int:
    out, meta = _prepare_out(cfg)
    params = _params(cfg)
    ts, de, dp = hole_dispersion_samples(params)
    eps, _ = hole_dispersion_continuum(ts, params)
    rows = list(zip(ts.tolist(), de.tolist(), dp.tolist()))
    dump_csv(out / "dispersion.csv", ["t_hole", "delta_e", "delta_p"], rows)
    # finite-size offset per side of the symmetric point, then sup norm
    mid = 0.5 * params.theta
    report = {}
    resid = np.empty_like(de)
    for name, sel in (("left", ts < mid), ("right", ts >= mid)):
        off = float(np.mean(de[sel] - eps[sel])) if np.any(sel) else 0.0
        resid[sel] = de[sel] - eps[sel] - off
        report[f"offset_{name}"] = off
    sup = float(np.max(np.abs(resid)) / np.max(eps))
    gap = None
    try:
        gap = estimate_gap_from_samples(params, ts, de)
    except SGVertexError:
        pass
    dump_json(out / "report.json", {
        **meta,
        "offsets": report,
        "sup_norm_vs_closed_form": sup,
        "gap_estimate": gap,
        "soliton_mass": soliton_mass(params),
        "sound_velocity": sound_velocity(params.eta),
    })
    print(f"dispersion: {len(ts)} holes, sup-norm {sup:.3e}")
    return 0


def cmd_vacuum(cfg: dict) -> int:
    out, meta = _prepare_out(cfg)
    params = _params(cfg)
    value = vacuum_energy_integral(params)
    payload = {**meta, "integral": value}
    try:
        singular = vacuum_energy_singular(params)
        payload["singular"] = singular
        payload["pole_coefficient"] = pole_coefficient(params.eta)
        payload["pole_coefficient_residue"] = pole_coefficient_residue(params.eta)
    except SGVertexError as exc:
        payload["singular_error"] = str(exc)
    dump_json(out / "report.json", payload)
    print(f"vacuum integral: {value!r}")
    return 0


def _mass_point(args) -> tuple[float, float | None, str]:
    eta, theta, L, source = args
    if source == "continuum":
        return theta, soliton_mass(ModelParams(eta=eta, theta=theta, L=4, M=2)), "continuum"
    p = ModelParams(eta=eta, theta=theta, L=L, M=L // 2)
    try:
        ts, de, _ = hole_dispersion_samples(p, inner_only=True)
        est = estimate_gap_from_samples(p, ts, de)
        return theta, est["gap_physical"], "BA"
    except SGVertexError as exc:
        return theta, None, f"dropped: {exc}"


def cmd_scan(cfg: dict) -> int:
    out, meta = _prepare_out(cfg)
    eta = cfg["eta"]
    grid = _theta_grid(cfg["theta_grid"])
    const = ContinuumConstants(eta)
    mass_exp, energy_exp = predicted_exponents(const.d)
    if cfg["observable"] == "mass":
        jobs = [(eta, th, cfg["L"], cfg["source"]) for th in grid]
        if cfg["workers"] > 1:
            with concurrent.futures.ProcessPoolExecutor(cfg["workers"]) as pool:
                points = sorted(pool.map(_mass_point, jobs))
        else:
            points = sorted(map(_mass_point, jobs))
        kept = [(th, v, s) for th, v, s in points if v is not None]
        from .scaling import ScalingSeries

        thetas = np.array([p[0] for p in kept])
        series = ScalingSeries(
            eta=eta,
            thetas=thetas,
            couplings=np.exp(-thetas),
            values=np.array([p[1] for p in kept]),
            provenance=[p[2] for p in kept],
            meta={"dropped": [p for p in points if p[1] is None]},
        )
        fit = power_law_fit(series, predicted_exponent=mass_exp)
    else:
        series = energy_scan(eta, grid)
        fit = power_law_fit(series, predicted_exponent=energy_exp)
    rows = list(zip(series.thetas.tolist(), series.couplings.tolist(),
                    series.values.tolist(), series.provenance))
    dump_csv(out / "scan.csv", ["theta", "h", "value", "provenance"], rows)
    fitted = fit.prefactor * series.couplings**fit.exponent
    dump_csv(out / "plotdata.csv", ["h", "value", "fit"],
             list(zip(series.couplings.tolist(), series.values.tolist(),
                      fitted.tolist())))
    dump_json(out / "report.json", {
        **meta,
        "fit": fit.as_dict(),
        "series_meta": series.meta,
        "predicted": {"mass_exponent": mass_exp, "energy_exponent": energy_exp},
    })
    dev = fit.relative_deviation
    print(f"{cfg['observable']} scan: exponent {fit.exponent:.6f} "
          f"(predicted {fit.predicted_exponent:.6f}, dev {dev:.2e})")
    return 0


HANDLERS = {
    "check": cmd_check,
    "diag": cmd_diag,
    "bethe": cmd_bethe,
    "dispersion": cmd_dispersion,
    "vacuum": cmd_vacuum,
    "scan": cmd_scan,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    defaults = parser.parse_args([args.command])
    try:
        cfg = merge_config(args, defaults)
        _params({**cfg, "M": cfg.get("M")})  # validate parameters early
        return HANDLERS[args.command](cfg)
    except (SGVertexError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
