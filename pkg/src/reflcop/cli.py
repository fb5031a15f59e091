"""Command line front end producing deterministic CSV/JSON artifacts.

Every command resolves its configuration from an optional JSON file
plus overriding flags, writes its data files into ``--out`` and drops a
``manifest.json`` recording the command, the fully resolved
configuration, a digest of it, the seed and the list of outputs.
Outputs are pure functions of the resolved configuration, so re-running
a command reproduces every file byte for byte.

Exit codes: 0 success, 2 usage or configuration error, 3 domain or
range error, 4 numerical failure.
"""

import argparse
import dataclasses
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .copulas import (
    FAMILIES,
    CopulaSpec,
    check_copula_axioms,
    empirical_copula,
    make_surface_grid,
)
from .errors import DomainError, NumericalError, RangeError
from .simulate import (
    CommodityFactors,
    LocalCorrParams,
    ProductSpec,
    SimConfig,
    TwoFactorParams,
    empirical_survival,
    simulate_local_correlation,
    simulate_multibarrier,
    simulate_reflection_pair,
    simulate_two_factor,
)
from .spread import MultiBarrierParams, calibrate_rho, mb_survival, mb_survival_limit
from ._util import write_csv


class UsageError(Exception):
    """Configuration or flag problem; maps to exit code 2."""


# Table-driven defaults for the commodity model, matching the worked
# two-factor example of the README.
_DEFAULT_POWER = {"sigma_s": 0.972925, "alpha_s": 17.0363, "sigma_l": 0.102555}
_DEFAULT_GAS = {"sigma_s": 0.112134, "alpha_s": 2.07832, "sigma_l": 0.092602}

# CLI-constructible copula families (the generic random-barrier family
# needs a Python callable and is library-only).
CLI_FAMILIES = sorted(FAMILIES - {"random_barrier_generic"})


@dataclasses.dataclass
class RunManifest:
    """Record of one CLI run; stable key order when serialized."""

    command: str
    config: dict
    config_digest: str
    seed: int
    outputs: list

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8", newline="\n")


def config_digest(resolved: dict) -> str:
    """SHA-256 of the canonical JSON form of a resolved configuration."""
    canon = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def _load_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a single JSON object")
    return doc


_FLAG_KEYS = ("seed", "paths", "dt", "resolution", "mode")


def _merge(args) -> dict:
    cfg = _load_config_file(args.config) if args.config else {}
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _check_keys(cfg: dict, allowed) -> None:
    allowed = set(allowed) | set(_FLAG_KEYS)
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise UsageError(
            f"unknown config keys {unknown}; allowed keys: {sorted(allowed)}"
        )


def _get_num(cfg, key, default=None):
    value = cfg.get(key, default)
    if value is None:
        raise UsageError(f"missing required config key {key!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise UsageError(f"config key {key!r} must be a number, got {value!r}")
    return float(value)


def _get_int(cfg, key, default=None):
    value = cfg.get(key, default)
    if value is None:
        raise UsageError(f"missing required config key {key!r}")
    if isinstance(value, bool) or not isinstance(value, int):
        raise UsageError(f"config key {key!r} must be an integer, got {value!r}")
    return value


def _get_str(cfg, key, default=None, choices=None):
    value = cfg.get(key, default)
    if value is None:
        raise UsageError(f"missing required config key {key!r}")
    if not isinstance(value, str):
        raise UsageError(f"config key {key!r} must be a string, got {value!r}")
    if choices is not None and value not in choices:
        raise UsageError(
            f"config key {key!r} must be one of {sorted(choices)}, got {value!r}"
        )
    return value


def _x_grid(cfg) -> np.ndarray:
    x_min = _get_num(cfg, "x_min", 0.0)
    x_max = _get_num(cfg, "x_max", 1.0)
    res = _get_int(cfg, "resolution", 100)
    if not x_min < x_max:
        raise UsageError("x_min must be smaller than x_max")
    if res < 1:
        raise UsageError("resolution must be >= 1")
    return np.linspace(x_min, x_max, res + 1)


def _sim_config(cfg, default_paths=1000) -> SimConfig:
    try:
        return SimConfig(
            dt=_get_num(cfg, "dt", 1e-3),
            horizon=_get_num(cfg, "t", 1.0),
            n_paths=_get_int(cfg, "paths", default_paths),
            seed=_get_int(cfg, "seed", 0),
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _snapshot_times(cfg, sim_cfg: SimConfig):
    """Explicit snapshot list, or an even thinning of the grid."""
    if "snapshots" in cfg:
        times = cfg["snapshots"]
        if not isinstance(times, list) or not all(
            isinstance(s, (int, float)) and not isinstance(s, bool) for s in times
        ):
            raise UsageError("config key 'snapshots' must be a list of numbers")
        return [float(s) for s in times]
    count = _get_int(cfg, "snapshot_count", min(sim_cfg.n_steps, 200))
    if count < 1:
        raise UsageError("snapshot_count must be >= 1")
    count = min(count, sim_cfg.n_steps)
    idx = np.unique(np.round(np.linspace(0, sim_cfg.n_steps, count + 1)).astype(int))
    return (idx * sim_cfg.dt).tolist()


def _mb_params(cfg) -> MultiBarrierParams:
    try:
        return MultiBarrierParams(
            nu=_get_num(cfg, "nu", 0.0),
            eta=_get_num(cfg, "eta", 0.5),
            rho=_get_num(cfg, "rho", 0.9),
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _lc_params(cfg) -> LocalCorrParams:
    try:
        return LocalCorrParams(
            nu=_get_num(cfg, "nu", 0.0),
            eta=_get_num(cfg, "eta", 0.5),
            rho1=_get_num(cfg, "rho1", -0.9),
            rho2=_get_num(cfg, "rho2", 0.9),
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_copula_grid(cfg: dict, out_dir: Path):
    """Sample a closed-form copula on a grid and audit its axioms."""
    _check_keys(cfg, {"family", "t", "h", "rho", "lam", "eta"})
    family = _get_str(cfg, "family", choices=CLI_FAMILIES)
    res = _get_int(cfg, "resolution", 100)
    if res < 2:
        raise UsageError("resolution must be >= 2")
    params = {
        key: _get_num(cfg, key) for key in ("t", "h", "rho", "lam", "eta")
        if key in cfg
    }
    try:
        spec = CopulaSpec(family=family, **params)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    grid = make_surface_grid(spec, res)
    grid.write_csv(out_dir / "copula_grid.csv")
    report = check_copula_axioms(grid)
    report_doc = dataclasses.asdict(report)
    report_doc["spec"] = spec.describe()
    (out_dir / "copula_axioms.json").write_text(
        json.dumps(report_doc, sort_keys=True, indent=2, default=list) + "\n",
        encoding="utf-8",
        newline="\n",
    )
    resolved = {"family": family, "resolution": res, "seed": _get_int(cfg, "seed", 0)}
    resolved.update(params)
    return resolved, ["copula_grid.csv", "copula_axioms.json"]


def _survival_n(cfg):
    """The regime-switch budget: an integer, a list, or "limit"."""
    n = cfg.get("n", 0)
    if n == "limit":
        return n
    if isinstance(n, list):
        if not n or not all(
            isinstance(k, int) and not isinstance(k, bool) and k >= 0 for k in n
        ):
            raise UsageError("config key 'n' list must hold integers >= 0")
        return n
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise UsageError("config key 'n' must be an integer >= 0, a list or 'limit'")
    return n


def _analytic_survival(n, t, x, params):
    if n == "limit":
        return mb_survival_limit(t, x, params)
    return mb_survival(n, t, x, params)


def cmd_survival(cfg: dict, out_dir: Path):
    """Spread survival curves, analytic and/or Monte Carlo."""
    _check_keys(
        cfg,
        {
            "model", "n", "t", "x_min", "x_max", "nu", "eta",
            "rho", "rho1", "rho2", "confidence",
        },
    )
    mode = _get_str(cfg, "mode", "analytic", choices={"analytic", "mc", "both"})
    model = _get_str(
        cfg, "model", "multibarrier", choices={"multibarrier", "local_corr"}
    )
    t = _get_num(cfg, "t", 1.0)
    x = _x_grid(cfg)
    confidence = _get_num(cfg, "confidence", 0.99)
    pct = int(round(100.0 * confidence))
    resolved = {
        "mode": mode,
        "model": model,
        "t": t,
        "x_min": float(x[0]),
        "x_max": float(x[-1]),
        "resolution": x.size - 1,
        "confidence": confidence,
        "seed": _get_int(cfg, "seed", 0),
    }
    outputs = []

    if model == "local_corr":
        if mode != "mc":
            raise UsageError(
                "model 'local_corr' has no closed-form curve; use mode 'mc'"
            )
        params = _lc_params(cfg)
        resolved.update(nu=params.nu, eta=params.eta, rho1=params.rho1,
                        rho2=params.rho2)
        sim_cfg = _sim_config(cfg, default_paths=10_000)
        resolved.update(paths=sim_cfg.n_paths, dt=sim_cfg.dt)
        pb = simulate_local_correlation(params, sim_cfg, snapshot_times=[t])
        curve = empirical_survival(pb.X[:, -1] - pb.Y[:, -1], x, confidence)
        curve.write_csv(out_dir / "survival_mc.csv")
        return resolved, ["survival_mc.csv"]

    params = _mb_params(cfg)
    resolved.update(nu=params.nu, eta=params.eta, rho=params.rho)
    n = _survival_n(cfg)
    resolved["n"] = n

    if mode == "analytic":
        for k in n if isinstance(n, list) else [n]:
            p = _analytic_survival(k, t, x, params)
            name = (
                "survival_analytic.csv"
                if not isinstance(n, list)
                else f"survival_analytic_n{k}.csv"
            )
            write_csv(out_dir / name, ("x", "p"), zip(x, p))
            outputs.append(name)
        return resolved, outputs

    if isinstance(n, list):
        raise UsageError("Monte Carlo modes need a scalar 'n' or 'limit'")
    cap = None if n == "limit" else n
    sim_cfg = _sim_config(cfg, default_paths=10_000)
    resolved.update(paths=sim_cfg.n_paths, dt=sim_cfg.dt)
    pb = simulate_multibarrier(params, cap, sim_cfg, snapshot_times=[t])
    curve = empirical_survival(pb.X[:, -1] - pb.Y[:, -1], x, confidence)

    if mode == "mc":
        curve.write_csv(out_dir / "survival_mc.csv")
        return resolved, ["survival_mc.csv"]

    p_analytic = _analytic_survival(n, t, x, params)
    rows = zip(x, p_analytic, curve.p, curve.lo, curve.hi)
    header = ("x", "p_analytic", "p_mc", f"lo{pct}", f"hi{pct}")
    write_csv(out_dir / "survival_both.csv", header, rows)
    return resolved, ["survival_both.csv"]


def cmd_simulate(cfg: dict, out_dir: Path):
    """Simulate paths of one of the four models and dump them as CSV."""
    model = _get_str(
        cfg,
        "model",
        choices={"reflection", "multibarrier", "local_corr", "commodity"},
    )
    common = {"model", "t", "snapshots", "snapshot_count"}
    sim_cfg = _sim_config(cfg, default_paths=100)
    resolved = {
        "model": model,
        "t": sim_cfg.horizon,
        "dt": sim_cfg.dt,
        "paths": sim_cfg.n_paths,
        "seed": int(sim_cfg.seed),
    }
    snaps = _snapshot_times(cfg, sim_cfg)
    resolved["snapshots"] = snaps

    if model == "reflection":
        _check_keys(cfg, common | {"h"})
        h = _get_num(cfg, "h")
        resolved["h"] = h
        try:
            batch = simulate_reflection_pair(h, sim_cfg, snapshot_times=snaps)
        except DomainError as exc:
            raise UsageError(str(exc)) from exc
    elif model == "multibarrier":
        _check_keys(cfg, common | {"nu", "eta", "rho", "n"})
        params = _mb_params(cfg)
        n = cfg.get("n", "limit")
        if n != "limit" and (isinstance(n, bool) or not isinstance(n, int) or n < 0):
            raise UsageError("config key 'n' must be an integer >= 0 or 'limit'")
        resolved.update(nu=params.nu, eta=params.eta, rho=params.rho, n=n)
        cap = None if n == "limit" else n
        batch = simulate_multibarrier(params, cap, sim_cfg, snapshot_times=snaps)
    elif model == "local_corr":
        _check_keys(cfg, common | {"nu", "eta", "rho1", "rho2"})
        params = _lc_params(cfg)
        resolved.update(
            nu=params.nu, eta=params.eta, rho1=params.rho1, rho2=params.rho2
        )
        batch = simulate_local_correlation(params, sim_cfg, snapshot_times=snaps)
    else:
        _check_keys(
            cfg,
            common
            | {
                "power", "gas", "heat_rate", "power_curve", "gas_curve",
                "product", "dependence",
            },
        )
        batch, extra = _run_commodity(cfg, sim_cfg, snaps)
        resolved.update(extra)

    batch.write_csv(out_dir / "paths.csv")
    return resolved, ["paths.csv"]


def _factors(cfg, key, default) -> CommodityFactors:
    doc = cfg.get(key, default)
    if not isinstance(doc, dict):
        raise UsageError(f"config key {key!r} must be an object of factor params")
    extra = sorted(set(doc) - {"sigma_s", "alpha_s", "sigma_l"})
    if extra:
        raise UsageError(f"unknown keys {extra} in config key {key!r}")
    try:
        return CommodityFactors(
            sigma_s=_get_num(doc, "sigma_s"),
            alpha_s=_get_num(doc, "alpha_s"),
            sigma_l=_get_num(doc, "sigma_l"),
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _run_commodity(cfg, sim_cfg, snaps):
    power = _factors(cfg, "power", _DEFAULT_POWER)
    gas = _factors(cfg, "gas", _DEFAULT_GAS)
    heat_rate = _get_num(cfg, "heat_rate", 1.0)
    power_curve = cfg.get("power_curve", 100.0)
    gas_curve = cfg.get("gas_curve")
    product_kind = _get_str(cfg, "product", "3MAH")
    dependence = cfg.get("dependence", 0.275546)
    try:
        params = TwoFactorParams(
            power=power,
            gas=gas,
            heat_rate=heat_rate,
            power_curve=power_curve,
            gas_curve=gas_curve,
        )
        product = ProductSpec(product_kind)
        if isinstance(dependence, dict):
            extra = sorted(set(dependence) - {"nu", "eta", "rho"})
            if extra:
                raise UsageError(f"unknown keys {extra} in config key 'dependence'")
            dep = MultiBarrierParams(
                nu=_get_num(dependence, "nu", 0.0),
                eta=_get_num(dependence, "eta", 0.5),
                rho=_get_num(dependence, "rho", 0.9),
            )
            dep_doc = {"nu": dep.nu, "eta": dep.eta, "rho": dep.rho}
        elif isinstance(dependence, (int, float)) and not isinstance(dependence, bool):
            dep = float(dependence)
            dep_doc = dep
        else:
            raise UsageError(
                "config key 'dependence' must be a number or an object"
                " with nu/eta/rho"
            )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    batch = simulate_two_factor(params, product, dep, sim_cfg, snapshot_times=snaps)
    extra = {
        "power": dataclasses.asdict(power),
        "gas": dataclasses.asdict(gas),
        "heat_rate": heat_rate,
        "power_curve": power_curve,
        "gas_curve": gas_curve,
        "product": product_kind,
        "dependence": dep_doc,
    }
    return batch, extra


def cmd_calibrate(cfg: dict, out_dir: Path):
    """Back out the regime correlation hitting a target survival."""
    _check_keys(cfg, {"target", "z", "eta", "nu", "t", "tol"})
    target = _get_num(cfg, "target")
    z = _get_num(cfg, "z")
    eta = _get_num(cfg, "eta", 0.5)
    nu = _get_num(cfg, "nu", 0.0)
    t = _get_num(cfg, "t", 1.0)
    tol = _get_num(cfg, "tol", 1e-6)
    rho, info = calibrate_rho(
        target, z, t, eta, nu=nu, tol=tol, full_output=True
    )
    result = {
        "rho": rho,
        "achieved": info["achieved"],
        "iterations": info["iterations"],
        "valid_range": list(info["valid_range"]),
    }
    text = json.dumps(result, sort_keys=True, indent=2) + "\n"
    (out_dir / "calibration.json").write_text(text, encoding="utf-8", newline="\n")
    sys.stdout.write(text)
    resolved = {
        "target": target, "z": z, "eta": eta, "nu": nu, "t": t, "tol": tol,
        "seed": _get_int(cfg, "seed", 0),
    }
    return resolved, ["calibration.json"]


def cmd_empirical_copula(cfg: dict, out_dir: Path):
    """Rank-based empirical copula of simulated terminal pairs."""
    _check_keys(
        cfg,
        {"model", "t", "h", "nu", "eta", "rho", "rho1", "rho2", "n"},
    )
    model = _get_str(
        cfg,
        "model",
        "multibarrier",
        choices={"reflection", "multibarrier", "local_corr"},
    )
    res = _get_int(cfg, "resolution", 50)
    if res < 2:
        raise UsageError("resolution must be >= 2")
    sim_cfg = _sim_config(cfg, default_paths=1000)
    if sim_cfg.n_paths < 100:
        raise UsageError("the empirical copula needs at least 100 paths")
    t = sim_cfg.horizon
    resolved = {
        "model": model,
        "t": t,
        "dt": sim_cfg.dt,
        "paths": sim_cfg.n_paths,
        "resolution": res,
        "seed": int(sim_cfg.seed),
    }
    if model == "reflection":
        h = _get_num(cfg, "h")
        resolved["h"] = h
        try:
            pb = simulate_reflection_pair(h, sim_cfg, snapshot_times=[t])
        except DomainError as exc:
            raise UsageError(str(exc)) from exc
    elif model == "multibarrier":
        params = _mb_params(cfg)
        n = cfg.get("n", "limit")
        if n != "limit" and (isinstance(n, bool) or not isinstance(n, int) or n < 0):
            raise UsageError("config key 'n' must be an integer >= 0 or 'limit'")
        resolved.update(nu=params.nu, eta=params.eta, rho=params.rho, n=n)
        cap = None if n == "limit" else n
        pb = simulate_multibarrier(params, cap, sim_cfg, snapshot_times=[t])
    else:
        params = _lc_params(cfg)
        resolved.update(
            nu=params.nu, eta=params.eta, rho1=params.rho1, rho2=params.rho2
        )
        pb = simulate_local_correlation(params, sim_cfg, snapshot_times=[t])
    grid = empirical_copula(pb.X[:, -1], pb.Y[:, -1], res)
    grid.write_csv(out_dir / "empirical_copula.csv", value_name="C_emp")
    return resolved, ["empirical_copula.csv"]


_COMMANDS = {
    "copula-grid": cmd_copula_grid,
    "survival": cmd_survival,
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "empirical-copula": cmd_empirical_copula,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reflcop",
        description="Deterministic data artifacts for reflection-coupled"
        " Brownian dependence models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "copula-grid": "sample a closed-form copula and audit its axioms",
        "survival": "spread survival curves, analytic and/or Monte Carlo",
        "simulate": "simulate model paths and write them as CSV",
        "calibrate": "solve for the regime correlation hitting a target",
        "empirical-copula": "empirical copula of simulated terminal pairs",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--seed", type=int, help="root RNG seed (default 0)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--paths", type=int, help="number of Monte Carlo paths")
        p.add_argument("--dt", type=float, help="simulation time step")
        p.add_argument("--resolution", type=int, help="grid resolution")
        p.add_argument(
            "--mode", choices=("analytic", "mc", "both"), help="survival mode"
        )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out_dir = Path(args.out)
    try:
        cfg = _merge(args)
        out_dir.mkdir(parents=True, exist_ok=True)
        resolved, outputs = _COMMANDS[args.command](cfg, out_dir)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RangeError as exc:
        lo, hi = exc.valid_range
        print(f"error: {exc} (valid range: [{lo!r}, {hi!r}])", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    manifest = RunManifest(
        command=args.command,
        config=resolved,
        config_digest=config_digest(resolved),
        seed=int(resolved.get("seed", 0)),
        outputs=outputs,
    )
    manifest.write(out_dir / "manifest.json")
    for name in outputs:
        print(out_dir / name)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
