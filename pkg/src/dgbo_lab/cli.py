"""Command-line front end.

Every command takes ``--config FILE`` (a JSON object, or a previous report)
plus one ``--<key> VALUE`` flag per setting; flags win over the document.
Values on the command line are parsed as JSON when possible, so lists and
objects can be given inline.  The resolved settings, including defaults and
the seed, are echoed in the report so a run can be reproduced from it.

Exit status: 0 when all checks pass, 1 when a check fails, 2 for a bad
configuration, 3 when the computation raised.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .damping import ProfileKind
from .errors import ConfigError, DGBOError
from .params import check_linear_range, check_nonlinear_range

HALF_PI = math.pi / 2

_MODEL = {"alpha": 1.5, "beta": 0.8, "profile": "smooth_bump", "support": [0.0, HALF_PI]}

SCHEMAS: dict[str, dict[str, Any]] = {
    "simulate": {**_MODEL, "K": 32, "N": None, "T_final": 10.0, "dt": None,
                 "ic": {"kind": "random", "amplitude": 1e-3}, "diagnostics_stride": 1, "nonlinearity": 1.0},
    "linear-spectrum": {**_MODEL, "K": 32, "fit": True},
    "gramian": {**_MODEL, "K": 24, "T": 5.0, "tol": 1e-8, "chain_n": 5},
    "ucp": {"alpha": 1.5, "K": 16, "T": 1.0, "window": [0.0, HALF_PI]},
    "ingham": {"alpha": 1.5, "K": 8, "T": 4.0, "N": 0},
    "znorm": {**_MODEL, "K": 8, "b": 1.0, "samples": 2**15},
    "decay-rate": {"input": None, "window_fraction": 1 / 3},
    "scan": {**_MODEL, "K": 32, "T_final": None, "dt": 0.1, "amplitudes": [0.0, 1e-3, 1e-2, 1e-1],
             "ic": {"kind": "random"}, "nonlinearity": 1.0},
}

CLAIM_SCHEMAS: dict[str, dict[str, Any]] = {
    "ck": {"profiles": ["constant", "raised_cosine", "smooth_bump"], "support": [0.0, HALF_PI],
           "betas": [0.5, 0.8, 1.0], "K": 1024},
    "resonance": {"alpha": 2.0, "K_max": 100},
    "modulation": {"alpha": 1.5, "beta": 0.8, "K_max": 60},
    "offdiag": {"alpha": 1.5, "beta": 0.8, "K_max": 500},
    "numerology": {"n": 50, "band": 1e-9},
    "a2": {"a": 0.5},
    "bilinear": {"alpha": 2.0, "beta": 0.5, "b": 0.55, "K": 16, "trials": 100, "dissipative": True},
    "n1": {**_MODEL, "b": 0.55, "K": 16, "trials": 50},
    "free": {**_MODEL, "b": 1.0, "K": 16, "trials": 100},
    "cutoff": {**_MODEL, "b": 0.4, "b_prime": 0.0, "K": 8},
    "duhamel": {**_MODEL, "b": 0.6, "K": 8, "trials": 20},
}

PROFILE_KINDS = {k.value for k in ProfileKind}
NONLINEAR = {"simulate", "scan"}
LINEAR = {"linear-spectrum", "gramian", "znorm"}


@dataclass
class RunConfig:
    command: str
    values: dict[str, Any]
    seed: int = 0
    claim: str | None = None

    def echo(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"command": self.command}
        if self.claim is not None:
            doc["claim"] = self.claim
        doc["seed"] = self.seed
        doc.update(self.values)
        return doc


@dataclass
class Report:
    config: RunConfig
    result: dict[str, Any] = field(default_factory=dict)
    checks: list[dict[str, Any]] = field(default_factory=list)
    error: dict[str, str] | None = None
    files: dict[str, str] = field(default_factory=dict, repr=False)
    duration: float | None = None

    def check(self, name: str, passed: bool, actual, expected=None, tolerance=None):
        self.checks.append({"name": name, "passed": bool(passed), "actual": _plain(actual),
                            "expected": _plain(expected), "tolerance": _plain(tolerance)})

    @property
    def ok(self) -> bool:
        return self.error is None and all(c["passed"] for c in self.checks)

    def to_dict(self) -> dict[str, Any]:
        doc = {"config": self.config.echo(), "result": _plain(self.result), "checks": self.checks,
               "status": "pass" if self.ok else ("error" if self.error else "fail")}
        if self.error:
            doc["error"] = self.error
        if self.duration is not None:
            doc["duration_s"] = self.duration
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"


def _plain(x):
    """Convert numpy scalars/arrays and tuples into JSON-ready values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


# -- configuration ---------------------------------------------------------------------

def _coerce(key: str, value, default):
    if value is None:
        return None
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
        raise ConfigError(f"{key} must be true or false, got {value!r}", key)
    if isinstance(default, int) or key == "N":
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not float(value).is_integer():
            raise ConfigError(f"{key} must be an integer, got {value!r}", key)
        return int(value)
    if isinstance(default, float) or (default is None and key in ("dt", "T_final")):
        try:
            v = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a number, got {value!r}", key) from None
        if not math.isfinite(v):
            raise ConfigError(f"{key} must be finite, got {value!r}", key)
        return v
    if isinstance(default, str) and not isinstance(value, str):
        raise ConfigError(f"{key} must be a string, got {value!r}", key)
    if isinstance(default, list) and not isinstance(value, list):
        raise ConfigError(f"{key} must be a list, got {value!r}", key)
    if isinstance(default, dict) and not isinstance(value, dict):
        raise ConfigError(f"{key} must be an object, got {value!r}", key)
    return value


def _validate(cfg: RunConfig):
    v = cfg.values
    try:
        if cfg.command in NONLINEAR or cfg.claim in ("n1",):
            check_nonlinear_range(v["alpha"], v["beta"])
        elif cfg.command in LINEAR or cfg.claim in ("free", "cutoff", "duhamel"):
            check_linear_range(v["alpha"], v["beta"])
        elif "alpha" in v and not v["alpha"] > 0:
            raise ValueError(f"alpha must be positive, got {v['alpha']}")
    except ValueError as exc:
        key = "alpha" if "alpha" in str(exc).split()[0] else "beta"
        raise ConfigError(str(exc), key) from None
    for key in ("K", "K_max", "trials", "samples", "n"):
        if key in v and v[key] is not None and v[key] < 1:
            raise ConfigError(f"{key} must be positive, got {v[key]}", key)
    for key in ("T", "T_final", "dt"):
        if key in v and v[key] is not None and not v[key] > 0:
            raise ConfigError(f"{key} must be positive, got {v[key]}", key)
    if "profile" in v and v["profile"] not in PROFILE_KINDS:
        raise ConfigError(f"unknown profile {v['profile']!r}; choose from {sorted(PROFILE_KINDS)}", "profile")
    if "profiles" in v:
        bad = [p for p in v["profiles"] if p not in PROFILE_KINDS]
        if bad:
            raise ConfigError(f"unknown profile {bad[0]!r}", "profiles")
    if cfg.command == "decay-rate":
        if not v.get("input"):
            raise ConfigError("decay-rate needs an input CSV", "input")
        if not Path(v["input"]).is_file():
            raise ConfigError(f"input {v['input']!r} is not a readable file", "input")


def parse_config(document: dict[str, Any] | None, overrides: dict[str, Any] | None = None,
                 command: str | None = None) -> RunConfig:
    """Merge a config document with flag overrides and validate every key."""
    doc = dict(document or {})
    if "config" in doc and "result" in doc:  # a previous report
        doc = dict(doc["config"])
    doc.update(overrides or {})
    cmd = doc.pop("command", None) or command
    if command is not None and cmd != command:
        raise ConfigError(f"document command {cmd!r} does not match {command!r}", "command")
    if cmd not in SCHEMAS and cmd != "verify-claims":
        raise ConfigError(f"unknown command {cmd!r}", "command")
    seed = doc.pop("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}", "seed")
    claim = doc.pop("claim", None)
    if cmd == "verify-claims":
        if claim not in CLAIM_SCHEMAS:
            raise ConfigError(f"unknown claim {claim!r}; choose from {sorted(CLAIM_SCHEMAS)}", "claim")
        schema = CLAIM_SCHEMAS[claim]
    else:
        if claim is not None:
            raise ConfigError("claim is only valid for verify-claims", "claim")
        schema = SCHEMAS[cmd]
    unknown = sorted(set(doc) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} for {claim or cmd}", unknown[0])
    values = {k: _coerce(k, doc.get(k, d), d) for k, d in schema.items()}
    cfg = RunConfig(cmd, values, seed, claim)
    _validate(cfg)
    return cfg


# -- command implementations ----------------------------------------------------------

def _profile(v, K):
    from .damping import build_profile
    return build_profile(v["profile"], tuple(v["support"]), K=K)


def _decomp(v, K):
    from .damping import compute_ck
    return compute_ck(_profile(v, K), v["beta"])


def _linear_matrix(v, K):
    from .params import ModelParams
    from .semigroup import build_linear_matrix
    return build_linear_matrix(ModelParams(v["alpha"], v["beta"], linear=True), decomp=_decomp(v, K))


def run_simulate(cfg: RunConfig, rep: Report):
    from .params import ModelParams
    from .solver import SimConfig, simulate
    v = cfg.values
    ic = dict(v["ic"])
    if ic.get("kind", "random") == "random":
        ic.setdefault("seed", cfg.seed)
    prof = _profile(v, v["K"])
    sc = SimConfig(ModelParams(v["alpha"], v["beta"], prof), v["K"], v["T_final"], v["dt"], v["N"], ic,
                   v["diagnostics_stride"], v["nonlinearity"])
    traj = simulate(sc)
    rep.files["trajectory.csv"] = traj.to_csv()
    rep.result = {"steps": int(round(v["T_final"] / traj.dt)), "dt": traj.dt,
                  "final_l2_norm": traj.l2_norm[-1], "max_mass_abs": float(traj.mass_abs.max()),
                  "max_reality_defect": traj.max_reality_defect}
    rep.check("mass", traj.mass_abs.max() <= 1e-14, traj.mass_abs.max(), 0.0, 1e-14)


def run_linear_spectrum(cfg: RunConfig, rep: Report):
    from .semigroup import fitted_decay_rate, spectral_abscissa
    v = cfg.values
    M = _linear_matrix(v, v["K"])
    spec = spectral_abscissa(M)
    rep.result = {"spectral_abscissa": spec.spectral_abscissa, "decay_rate": spec.decay_rate,
                  "leading_eigenvalues": [[e.real, e.imag] for e in spec.eigenvalues[:8]]}
    rep.check("abscissa negative", spec.spectral_abscissa < 0, spec.spectral_abscissa, "< 0")
    if v["fit"]:
        rate = fitted_decay_rate(M, seed=cfg.seed)
        rep.result["fitted_rate"] = rate
        rel = abs(rate / spec.decay_rate - 1)
        rep.check("fitted rate", rel < 0.05, rate, spec.decay_rate, 0.05)


def run_gramian(cfg: RunConfig, rep: Report):
    from .semigroup import decay_chain, l2_norm, observability_gramian
    v = cfg.values
    M = _linear_matrix(v, v["K"])
    g = observability_gramian(M, v["T"], tol=v["tol"])
    mu = 2.0 * g.min_eigenvalue
    rng = np.random.default_rng(cfg.seed)
    v0 = rng.standard_normal(M.dim) + 1j * rng.standard_normal(M.dim)
    v0 = 0.5 * (v0 + np.conj(v0[::-1]))
    v0 = v0 / l2_norm(v0)
    chain = decay_chain(M, v["T"], mu, v0, v["chain_n"])
    rep.result = {"min_eigenvalue": g.min_eigenvalue, "energy_residual": g.energy_residual, "nodes": g.order,
                  "mu": mu, "chain": chain}
    rep.check("gramian positive", g.min_eigenvalue > 0, g.min_eigenvalue, "> 0")
    rep.check("energy residual", g.energy_residual < v["tol"], g.energy_residual, 0.0, v["tol"])
    rep.check("decay chain", all(a <= b * (1 + 1e-12) for a, b in chain), chain)


def run_ucp(cfg: RunConfig, rep: Report):
    from .semigroup import ucp_gramian
    v = cfg.values
    mu = ucp_gramian(v["alpha"], v["K"], v["T"], tuple(v["window"]))
    rep.result = {"min_eigenvalue": mu}
    rep.check("strip gramian positive", mu > 0, mu, "> 0")


def run_ingham(cfg: RunConfig, rep: Report):
    from .semigroup import biorthogonal_residual, ingham_gaps
    v = cfg.values
    g = ingham_gaps(v["alpha"], v["K"], v["N"])
    res = biorthogonal_residual(v["alpha"], v["K"], v["T"], v["N"])
    rep.result = {"gamma": g.gamma, "gamma_inf": g.gamma_inf, "biorthogonal_residual": res}
    rep.check("biorthogonal residual", res < 1e-6, res, 0.0, 1e-6)


def run_znorm(cfg: RunConfig, rep: Report):
    from .analysis.estimates import free_field, random_coefficients, free_mode_integral, _decay_window
    from .analysis.zspace import ZbParams, znorm
    v = cfg.values
    dec = _decomp(v, v["K"])
    grid = dec.grid
    f = random_coefficients(grid, np.random.default_rng(cfg.seed))
    Tw = _decay_window(dec.c[grid.wavenumbers != 0])
    t = np.linspace(-Tw, Tw, v["samples"], endpoint=False)
    zb = ZbParams(v["b"], v["beta"], v["alpha"])
    fld = free_field(dec, v["alpha"], f, t)
    sampled = znorm(fld, zb)
    exact = math.sqrt(sum(free_mode_integral(float(dec.c[i]), float(k), zb.b, zb.beta) * abs(f[i]) ** 2
                          for i, k in enumerate(grid.wavenumbers) if k != 0))
    rep.result = {"znorm": sampled, "znorm_exact": exact, "l2_tx": fld.l2_norm(), "window": Tw}
    rep.check("sampled vs exact", abs(sampled / exact - 1) < 1e-3, sampled, exact, 1e-3)


def run_decay_rate(cfg: RunConfig, rep: Report):
    from .solver import fit_decay_rate, is_monotone, read_trajectory_csv
    v = cfg.values
    traj = read_trajectory_csv(Path(v["input"]).read_text())
    fit = fit_decay_rate(traj, v["window_fraction"])
    rep.result = {"rate": fit.rate, "fit_residual": fit.residual, "samples": fit.samples,
                  "truncated": fit.truncated, "monotone": is_monotone(traj.l2_norm)}
    rep.check("positive rate", fit.rate > 0, fit.rate, "> 0")


def run_scan(cfg: RunConfig, rep: Report):
    from .params import ModelParams
    from .semigroup import build_linear_matrix, spectral_abscissa
    from .solver import SimConfig, delta_threshold_scan
    v = cfg.values
    dec = _decomp(v, v["K"])
    lin = spectral_abscissa(build_linear_matrix(ModelParams(v["alpha"], v["beta"], linear=True), decomp=dec))
    T = v["T_final"] if v["T_final"] is not None else 40.0 / lin.decay_rate
    ic = dict(v["ic"])
    if ic.get("kind", "random") == "random":
        ic.setdefault("seed", cfg.seed)
    stride = max(1, round(1.0 / v["dt"]))
    tmpl = SimConfig(ModelParams(v["alpha"], v["beta"], dec.profile), v["K"], T, v["dt"], None, ic, stride,
                     v["nonlinearity"])
    rows = delta_threshold_scan(tmpl, v["amplitudes"], dec)
    rep.result = {"linear_rate": lin.decay_rate, "T_final": T, "rows": rows}
    for r in rows:
        rep.check(f"decay at amplitude {r['amplitude']:g}", r["rate"] > 0 and r["monotone"], r["rate"], "> 0")


def run_verify(cfg: RunConfig, rep: Report):
    VERIFIERS[cfg.claim](cfg, rep)


def _verify_ck(cfg, rep):
    from .damping import build_profile, compute_ck
    v = cfg.values
    k = np.arange(-v["K"], v["K"] + 1)
    rows = []
    for name in v["profiles"]:
        for beta in v["betas"]:
            prof = build_profile(name, tuple(v["support"]), K=16)
            dec = compute_ck(prof, beta)
            c = dec.c_at(k)
            lo = np.abs(k) ** beta / (4 * math.pi**2)
            C = dec.upper_constant()
            hi = C * (1 + np.abs(k) ** beta)
            ok = bool(np.all(c >= lo * (1 - 1e-12)) and np.all(c <= hi))
            rows.append({"profile": name, "beta": beta, "C": C, "min_lower_margin": float(np.min(c - lo)),
                         "passed": ok})
            rep.check(f"{name} beta={beta}", ok, float(np.min(c - lo)))
    rep.result = {"rows": rows}


def _verify_resonance(cfg, rep):
    from .analysis.arithmetic import cubic_ratio, resonance_constant_scan
    v = cfg.values
    s = resonance_constant_scan(v["alpha"], v["K_max"])
    rep.result = {"min_ratio": s.min_ratio, "witness": s.argmin, "triples": s.count}
    rep.check("positive constant", s.min_ratio > 0, s.min_ratio, "> 0")
    if v["alpha"] == 2.0:
        rep.check("cubic identity", s.min_ratio == cubic_ratio(s.argmin), s.min_ratio, cubic_ratio(s.argmin), 0.0)


def _verify_modulation(cfg, rep):
    from .analysis.arithmetic import minmax_modulation, minmax_modulation_grid, modulation_scan
    v = cfg.values
    a, b = v["alpha"], v["beta"]
    s = modulation_scan(a, b, v["K_max"])
    worst = 0.0
    for t in (s.general_witness, s.low_witness, (1, 1, -2), (3, 5, -8)):
        worst = max(worst, abs(minmax_modulation(t, a, b) - minmax_modulation_grid(t, a, b)))
    rep.result = {"general_constant": s.general, "general_witness": s.general_witness, "low_constant": s.low,
                  "low_witness": s.low_witness, "min_minmax": s.min_value, "grid_discrepancy": worst}
    rep.check("closed form vs grid", worst < 1e-6, worst, 0.0, 1e-6)
    rep.check("general constant positive", s.general > 0, s.general, "> 0")
    rep.check("low-frequency constant positive", s.low > 0, s.low, "> 0")


def _verify_offdiag(cfg, rep):
    from .analysis.arithmetic import offdiag_gap_scan
    v = cfg.values
    val, wit = offdiag_gap_scan(v["alpha"], v["beta"], v["K_max"])
    rep.result = {"constant": val, "witness": wit}
    rep.check("gap constant positive", val > 0, val, "> 0")


def _verify_numerology(cfg, rep):
    from .analysis.arithmetic import numerology_grid
    v = cfg.values
    bad, n = numerology_grid(v["n"], v["band"])
    rep.result = {"violations": bad, "checked": n}
    rep.check("nonempty iff alpha+beta>2", not bad, len(bad), 0)


def _verify_a2(cfg, rep):
    from .analysis.weights import a2_constant
    v = cfg.values
    est = a2_constant(v["a"])
    rep.result = {"estimate": est.value, "centre": est.centre, "length": est.length, "intervals": est.intervals}
    rep.check("finite", math.isfinite(est.value) and est.value >= 1 - 1e-12, est.value, ">= 1")


def _verify_bilinear(cfg, rep):
    from .analysis.estimates import bilinear_ratio
    from .analysis.zspace import ZbParams
    v = cfg.values
    r = bilinear_ratio(ZbParams(v["b"], v["beta"], v["alpha"]), v["K"], v["trials"], cfg.seed, v["dissipative"])
    rep.result = {"max": r.max, "mean": r.mean, "witness": r.witness}
    rep.check("finite", math.isfinite(r.max), r.max)


def _verify_n1(cfg, rep):
    from .analysis.estimates import n1_bound_ratio
    from .analysis.zspace import ZbParams
    v = cfg.values
    r = n1_bound_ratio(ZbParams(v["b"], v["beta"], v["alpha"]), _decomp(v, v["K"]), v["trials"], cfg.seed)
    rep.result = {"max": r.max, "mean": r.mean}
    rep.check("finite", math.isfinite(r.max), r.max)


def _verify_free(cfg, rep):
    from .analysis.estimates import free_solution_ratio
    from .analysis.zspace import ZbParams
    v = cfg.values
    r = free_solution_ratio(ZbParams(v["b"], v["beta"], v["alpha"]), _decomp(v, v["K"]), v["trials"], cfg.seed)
    rep.result = {"max": r.max, "mean": r.mean, "per_mode_max": r.witness["per_mode_max"]}
    rep.check("finite", math.isfinite(r.max), r.max)


def _verify_cutoff(cfg, rep):
    from .analysis.estimates import cutoff_scaling, free_source, random_coefficients
    v = cfg.values
    dec = _decomp(v, v["K"])
    f = random_coefficients(dec.grid, np.random.default_rng(cfg.seed))
    fit = cutoff_scaling(dec.grid, v["alpha"], v["beta"], free_source(dec, v["alpha"], f), v["b"], v["b_prime"])
    bound = v["b"] - v["b_prime"] + 0.1
    rep.result = {"slope": fit.slope, "T": fit.T, "ratios": fit.ratios}
    rep.check("slope bound", fit.slope <= bound, fit.slope, f"<= {bound:g}")


def _verify_duhamel(cfg, rep):
    from .analysis.estimates import duhamel_smoothing_ratio
    from .analysis.zspace import ZbParams
    v = cfg.values
    r = duhamel_smoothing_ratio(ZbParams(v["b"], v["beta"], v["alpha"]), _decomp(v, v["K"]), v["trials"],
                                cfg.seed)
    rep.result = {"max": r.max, "mean": r.mean}
    rep.check("finite", math.isfinite(r.max), r.max)


VERIFIERS: dict[str, Callable[[RunConfig, Report], None]] = {
    "ck": _verify_ck, "resonance": _verify_resonance, "modulation": _verify_modulation,
    "offdiag": _verify_offdiag, "numerology": _verify_numerology, "a2": _verify_a2,
    "bilinear": _verify_bilinear, "n1": _verify_n1, "free": _verify_free, "cutoff": _verify_cutoff,
    "duhamel": _verify_duhamel,
}

COMMANDS: dict[str, Callable[[RunConfig, Report], None]] = {
    "simulate": run_simulate, "linear-spectrum": run_linear_spectrum, "gramian": run_gramian, "ucp": run_ucp,
    "ingham": run_ingham, "znorm": run_znorm, "verify-claims": run_verify, "decay-rate": run_decay_rate,
    "scan": run_scan,
}


def run(cfg: RunConfig, timing: bool = False) -> Report:
    """Dispatch a validated configuration; module errors land in ``Report.error``."""
    rep = Report(cfg)
    start = time.perf_counter()
    try:
        COMMANDS[cfg.command](cfg, rep)
    except (DGBOError, ValueError, ArithmeticError) as exc:
        rep.error = {"type": type(exc).__name__, "message": str(exc)}
    if timing:
        rep.duration = time.perf_counter() - start
    return rep


# -- argument parsing ---------------------------------------------------------------------

def _flag_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dgbo-lab", description="Damped dispersive spectral lab.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config document or previous report")
        sp.add_argument("--out", help="directory for report.json and data files")
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--timing", action="store_true", help="include wall-clock duration in the report")
        if name == "verify-claims":
            sp.add_argument("--claim", choices=sorted(CLAIM_SCHEMAS), default=argparse.SUPPRESS)
            keys = sorted({k for s in CLAIM_SCHEMAS.values() for k in s})
        else:
            keys = list(SCHEMAS[name])
        for key in keys:
            sp.add_argument(f"--{key}", dest=f"set_{key}", type=_flag_value, default=argparse.SUPPRESS,
                            metavar="VALUE")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    ns = vars(args)
    overrides = {k[4:]: v for k, v in ns.items() if k.startswith("set_")}
    for key in ("seed", "claim"):
        if key in ns:
            overrides[key] = ns[key]
    try:
        doc = None
        if args.config:
            try:
                doc = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc}", "config") from None
            if not isinstance(doc, dict):
                raise ConfigError("config document must be a JSON object", "config")
        cfg = parse_config(doc, overrides, args.command)
    except ConfigError as exc:
        sys.stderr.write(f"config error ({exc.key}): {exc}\n")
        return 2
    rep = run(cfg, timing=args.timing)
    text = rep.to_json()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, content in rep.files.items():
            (out / name).write_text(content)
        (out / "report.json").write_text(text)
    sys.stdout.write(text)
    if rep.error:
        return 3
    return 0 if rep.ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
