"""Scenario orchestration: config loading/validation, the evaluator registry,
deterministic parallel execution, and CSV/JSON report emission.

Identical config + seeds produce byte-identical CSV regardless of the worker
count: scenarios own their seeds, and the manifest merge is ordered by
scenario name.
"""

import concurrent.futures
import csv
import hashlib
import json
import math
import pathlib
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bounds.report import BoundReport
from .constants import ARGON, LJUnits, registry
from .thermal import ThermalContext


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# scenario context: lazily built models, ensembles, probes, trajectories


class ScenarioContext:
    def __init__(self, cfg):
        self.cfg = cfg
        self.name = cfg["name"]
        self.units_mode = cfg.get("units", "natural")
        self.constants = registry(self.units_mode)
        self._model = None
        self._trajectory = None
        self._ensembles = {}

    # thermal contexts -----------------------------------------------------

    def thermal_context(self, beta) -> ThermalContext:
        c = self.constants
        return ThermalContext(T=1.0 / (c.k_B * beta), hbar=c.hbar, k_B=c.k_B)

    def si_context_for_md(self, t_reduced) -> ThermalContext:
        units = self.lj_units()
        return ThermalContext(T=t_reduced * units.temperature,
                              hbar=registry("si").hbar, k_B=registry("si").k_B)

    def lj_units(self) -> LJUnits:
        m = self.cfg.get("model", {})
        mapping = m.get("si_mapping", {})
        if not mapping or mapping.get("material", "argon") == "argon":
            return ARGON
        return LJUnits(sigma=mapping["sigma"], epsilon=mapping["epsilon"],
                       mass=mapping["mass"])

    # models -----------------------------------------------------------------

    def model(self):
        if self._model is None:
            self._model = self._build_model()
        return self._model

    def _build_model(self):
        cfg = self.cfg.get("model")
        if cfg is None:
            return None
        kind = cfg["kind"]
        if kind == "xy_chain":
            from .models import XYChainSpec, build_xy_chain
            return build_xy_chain(XYChainSpec(N=cfg["N"], J=cfg.get("J", 1.0),
                                              periodic=cfg.get("periodic", True)))
        if kind == "oscillator":
            from .models import OscillatorSpec, build_oscillator
            return build_oscillator(OscillatorSpec(omega=cfg.get("omega", 1.0),
                                                   mass=cfg.get("mass", 1.0),
                                                   n_max=cfg.get("n_max", 80)))
        if kind == "ising":
            from .models import IsingLatticeSpec
            return IsingLatticeSpec(shape=tuple(cfg["shape"]), J=cfg.get("J", 1.0),
                                    field=cfg.get("field", 0.0),
                                    periodic=cfg.get("periodic", True))
        if kind == "fermi_gas":
            from .models import FermiGasSpec
            return FermiGasSpec(effective_mass=cfg.get("effective_mass", 1.0),
                                mu=cfg.get("mu", 1.0))
        if kind == "lj_md":
            from .md.system import Langevin, MDSystem
            box = (cfg["n"] / cfg["density"]) ** (1.0 / 3.0)
            return MDSystem(
                n=cfg["n"], box=box, mass=cfg.get("mass", 1.0),
                potential=("lj", {"epsilon": cfg.get("epsilon", 1.0),
                                  "sigma": cfg.get("sigma", 1.0),
                                  "cutoff": cfg.get("cutoff", 2.3)}),
                dt=cfg.get("dt", 0.004),
                thermostat=Langevin(gamma=cfg.get("gamma", 1.0), T=cfg["T"],
                                    seed=cfg["seed"]),
            )
        raise ConfigError(f"scenario {self.name}: unknown model kind {kind!r}")

    def trajectory(self):
        if self._trajectory is None:
            from .md.system import equilibrate_then_sample
            cfg = self.cfg["model"]
            self._trajectory = equilibrate_then_sample(
                self.model(),
                equil_steps=cfg.get("equil_steps", 10_000),
                steps=cfg.get("steps", 60_000),
                sample_every=cfg.get("sample_every", 5),
            )
        return self._trajectory

    def ensemble(self, beta):
        key = float(beta)
        if key not in self._ensembles:
            from .thermal import CanonicalEnsemble
            self._ensembles[key] = CanonicalEnsemble(self.model().hamiltonian,
                                                     self.thermal_context(beta))
        return self._ensembles[key]

    # probes -----------------------------------------------------------------

    def tilt_operator(self, kind):
        from .operator_core import DenseOperator
        model = self.model()
        ops = model.site_ops
        n = model.spec.N
        if kind == "collective-x":
            total = sum(ops["x"][i].entries for i in range(n))
        elif kind == "bond-shear":
            total = sum(ops["y"][i].entries @ ops["z"][(i + 1) % n].entries
                        + ops["x"][i].entries @ ops["z"][(i + 1) % n].entries
                        for i in range(n))
        else:
            raise ConfigError(f"unknown tilt kind {kind!r}")
        return DenseOperator(total, hermitian=True)

    def probe(self, beta, override=None):
        from .probes import canonical_probe, filtered_pure_probe, tilted_canonical_probe
        cfg = override if override is not None else self.cfg.get("probe",
                                                                 {"kind": "canonical"})
        kind = cfg["kind"]
        if kind == "canonical":
            return canonical_probe(self.ensemble(beta))
        if kind == "tilted":
            tilt = self.tilt_operator(cfg.get("tilt", "bond-shear"))
            return tilted_canonical_probe(self.model().hamiltonian, tilt,
                                          cfg["epsilon"], self.thermal_context(beta))
        if kind == "filtered_pure":
            return filtered_pure_probe(self.ensemble(beta), cfg["window"], cfg["seed"])
        raise ConfigError(f"unknown probe kind {kind!r}")


# ---------------------------------------------------------------------------
# evaluator registry


EVALUATORS = {}


def evaluator(name):
    def wrap(fn):
        EVALUATORS[name] = fn
        return fn
    return wrap


def _xy_site_observables(sctx, beta, axis):
    from .dynamics import select_local_hamiltonian
    model = sctx.model()
    return [(model.site(axis, i),
             select_local_hamiltonian(model.terms, model.site(axis, i),
                                      hamiltonian=model.hamiltonian))
            for i in range(model.spec.N)]


@evaluator("central_rate_bound")
def _ev_central(sctx, beta, params):
    from .bounds.quantum import central_rate_bound
    axis = params.get("axis", "x")
    obs = _xy_site_observables(sctx, beta, axis)
    probe = sctx.probe(beta, params.get("probe"))
    rep = central_rate_bound(sctx.ensemble(beta), probe, obs,
                             name=f"central_rate_bound[{axis}]")
    from .models import xy_local_variance_from_correlators
    var_asm, _ = xy_local_variance_from_correlators(sctx.model(), sctx.ensemble(beta),
                                                    0, axis)
    rep.metadata["varxy_correlator_route"] = var_asm
    rep.metadata["varxy_gap"] = abs(var_asm - rep.metadata["local_hamiltonian_variance"])
    return [rep]


@evaluator("moment_rate_bound")
def _ev_moment(sctx, beta, params):
    from .bounds.quantum import moment_rate_bound
    axis = params.get("axis", "x")
    site = params.get("site", 0)
    model = sctx.model()
    from .dynamics import select_local_hamiltonian
    q = model.site(axis, site)
    sel = select_local_hamiltonian(model.terms, q, hamiltonian=model.hamiltonian)
    return [moment_rate_bound(sctx.ensemble(beta), q, sel, n=params.get("n", 2),
                              variant=params.get("variant", "exact-deformed"))]


@evaluator("autocorr_derivative_bound")
def _ev_autocorr(sctx, beta, params):
    from .bounds.quantum import autocorr_derivative_bound
    from .dynamics import autocorrelation, select_local_hamiltonian
    model = sctx.model()
    axis = params.get("axis", "x")
    q = model.site(axis, params.get("site", 0))
    sel = select_local_hamiltonian(model.terms, q, hamiltonian=model.hamiltonian)
    ens = sctx.ensemble(beta)
    import numpy as _np
    from .thermal import thermal_variance
    sigma = math.sqrt(thermal_variance(ens, sel.operator))
    horizon = params.get("horizon_over_planck", 20.0) * ens.context.hbar / sigma
    grid = _np.linspace(0.0, horizon, params.get("n_grid", 512))
    series = autocorrelation(ens, q, grid)
    return [autocorr_derivative_bound(series, ens, q, sel)]


@evaluator("thermalization_window_bound")
def _ev_thermalization(sctx, beta, params):
    from .bounds.quantum import thermalization_window_bound
    from .dynamics import select_local_hamiltonian
    model = sctx.model()
    q = model.site(params.get("axis", "x"), params.get("site", 0))
    sel = select_local_hamiltonian(model.terms, q, hamiltonian=model.hamiltonian)
    probe = sctx.probe(beta, params.get("probe"))
    return [thermalization_window_bound(probe, q, sel, sctx.ensemble(beta))]


@evaluator("two_point_correlator_bound")
def _ev_two_point(sctx, beta, params):
    from .bounds.quantum import two_point_correlator_bound
    from .dynamics import select_local_hamiltonian
    from .operator_core import DenseOperator
    model = sctx.model()
    axis = params.get("axis", "x")
    region = params.get("region") or list(range(model.spec.N))
    qs = [model.site(axis, i) for i in region]
    total = sum(q.entries for q in qs) / len(qs)
    sel = select_local_hamiltonian(model.terms, DenseOperator(total, hermitian=True),
                                   hamiltonian=model.hamiltonian)
    probe = sctx.probe(beta, params.get("probe"))
    ens = sctx.ensemble(beta)
    window = params.get("window_over_planck", 10.0) * ens.context.planckian_time()
    return [two_point_correlator_bound(ens, probe, qs, sel, window)]


@evaluator("eth_offdiagonal_experiment")
def _ev_eth(sctx, beta, params):
    from .bounds.quantum import eth_offdiagonal_experiment
    from .models import XYChainSpec, build_xy_chain
    sizes = params.get("sizes", [6, 8, 10])
    models = [build_xy_chain(XYChainSpec(N=n)) for n in sizes]
    return [eth_offdiagonal_experiment(models, n_seeds=params.get("n_seeds", 32),
                                       seed=params.get("seed", 4))]


@evaluator("orthogonality_time_bound")
def _ev_qsl(sctx, beta, params):
    from .bounds.quantum import orthogonality_time_thermal
    return [orthogonality_time_thermal(sctx.ensemble(beta))]


@evaluator("reflection_positivity_audit")
def _ev_rp(sctx, beta, params):
    from .bounds.audits import reflection_positivity_audit
    return [reflection_positivity_audit(sctx.model(), beta)]


@evaluator("decoupled_variance_additivity")
def _ev_decoupled(sctx, beta, params):
    from .bounds.audits import decoupled_variance_additivity
    from .models import OscillatorSpec
    n_modes = params.get("n_modes", 3)
    omega = params.get("omega", 1.0)
    n_max = params.get("n_max", 15)
    specs = [OscillatorSpec(omega=omega, n_max=n_max) for _ in range(n_modes)]
    return [decoupled_variance_additivity(specs, sctx.thermal_context(beta))]


@evaluator("lowT_highT_scaling")
def _ev_scaling(sctx, beta, params):
    from .bounds.audits import high_t_kinetic_scaling, low_t_fermi_scaling
    from .models import FermiGasSpec
    reports = []
    t_low = params.get("fermi_T_over_mu", [0.004, 0.006, 0.01, 0.016, 0.025, 0.04])
    spec = sctx.model() if isinstance(sctx.model(), FermiGasSpec) else FermiGasSpec()
    reports.append(low_t_fermi_scaling(spec, [t * spec.mu for t in t_low]))
    t_high = params.get("kinetic_T_over_omega", [10.0, 16.0, 25.0, 40.0, 63.0, 100.0])
    reports.append(high_t_kinetic_scaling(1.0, t_high))
    return reports


@evaluator("ioffe_regel_check")
def _ev_ioffe(sctx, beta, params):
    from .bounds.audits import ioffe_regel_check
    si = registry("si")
    ctx = ThermalContext(T=params.get("T", 100.0), hbar=si.hbar, k_B=si.k_B)
    from .constants import ARGON_MASS_SI
    return [ioffe_regel_check(tau=params.get("tau", 1e-12),
                              ell_mfp=params.get("ell_mfp", 1e-9),
                              mass=params.get("mass", ARGON_MASS_SI), ctx=ctx)]


@evaluator("oscillator_closed_forms")
def _ev_osc_forms(sctx, beta, params):
    from .models import oscillator_kinetic_variance, oscillator_partition
    from .thermal import thermal_variance
    model = sctx.model()
    ens = sctx.ensemble(beta)
    kin = dict(model.terms)["kinetic"]
    x = beta * model.spec.hbar * model.spec.omega
    var_num = thermal_variance(ens, kin)
    var_ref = oscillator_kinetic_variance(x, model.spec.hbar * model.spec.omega)
    z_num = ens.Z_shifted * math.exp(-beta * ens.hamiltonian.eigenvalues[0])
    z_ref = oscillator_partition(x)
    rep = BoundReport(
        name="oscillator_closed_forms", lhs=var_num, rhs=var_ref,
        tolerance=1e-8 * var_ref,
        metadata={"beta_hbar_omega": x, "Z_numeric": z_num, "Z_closed_form": z_ref,
                  "Z_gap": abs(z_num - z_ref)},
    )
    rep.satisfied = bool(abs(var_num - var_ref) <= 1e-8 * var_ref
                         and abs(z_num - z_ref) <= 1e-10 * z_ref)
    return [rep]


@evaluator("uncertainty_fuzz")
def _ev_fuzz(sctx, beta, params):
    from .bounds.fuzzing import cauchy_schwarz_fuzz, uncertainty_fuzz
    seed = params.get("seed", 11)
    draws = params.get("draws", 1000)
    r1 = uncertainty_fuzz(draws=draws, max_dim=params.get("max_dim", 8), seed=seed)
    r2 = cauchy_schwarz_fuzz(draws=draws, max_dim=params.get("max_dim", 8), seed=seed + 1)
    return [r1, r2]


@evaluator("quadratic_moment_fuzz")
def _ev_qfuzz(sctx, beta, params):
    from .bounds.fuzzing import deformed_quadratic_fuzz
    return [deformed_quadratic_fuzz(draws=params.get("draws", 500),
                                    max_dim=params.get("max_dim", 64),
                                    seed=params.get("seed", 5))]


@evaluator("reference_constants")
def _ev_constants(sctx, beta, params):
    from .constants import O2_MASS_SI, WATER_NUMBER_DENSITY_SI
    si = registry("si")
    tau = si.planckian_time(300.0)
    lam = si.thermal_wavelength(O2_MASS_SI, 300.0)
    nh = si.min_viscosity_scale(WATER_NUMBER_DENSITY_SI)
    checks = [
        ("planckian_time_300K", tau, 2.5e-14, 0.02),
        ("water_n_hbar", nh, 3.5e-6, 0.03),
        ("thermal_wavelength_O2_300K", lam, 1.8e-11, 0.05),
    ]
    reports = []
    for label, value, ref, tol in checks:
        rep = BoundReport(name=f"reference_constants[{label}]",
                          lhs=value, rhs=ref, tolerance=tol * ref,
                          metadata={"relative_gap": abs(value - ref) / ref,
                                    "allowed": tol})
        rep.satisfied = bool(abs(value - ref) <= tol * ref)
        reports.append(rep)
    return reports


@evaluator("md_statistics")
def _ev_md_stats(sctx, beta, params):
    from .md.analysis import local_statistics
    traj = sctx.trajectory()
    t_star = sctx.cfg["model"]["T"]
    stats = local_statistics(traj, temperature=t_star)
    kurt = stats["v4"] / stats["v2"] ** 2
    rep1 = BoundReport(name="md_statistics[equipartition]", lhs=stats["v2"],
                       rhs=t_star / traj.system.mass,
                       tolerance=0.02 * t_star / traj.system.mass,
                       metadata=stats)
    rep1.satisfied = bool(abs(rep1.lhs - rep1.rhs) <= rep1.tolerance)
    rep2 = BoundReport(name="md_statistics[velocity_kurtosis]", lhs=kurt, rhs=3.0,
                       tolerance=0.05 * 3.0, metadata={"v4": stats["v4"]})
    rep2.satisfied = bool(abs(kurt - 3.0) <= 0.15)
    return [rep1, rep2]


@evaluator("diffusion_lower_bound")
def _ev_diffusion(sctx, beta, params):
    from .bounds.transport import diffusion_bound_from_trajectory
    traj = sctx.trajectory()
    ctx = sctx.si_context_for_md(sctx.cfg["model"]["T"])
    return [diffusion_bound_from_trajectory(traj, sctx.lj_units(), ctx,
                                            max_lag=params.get("max_lag", 400),
                                            radius=params.get("radius"))]


@evaluator("transport_lower_bound")
def _ev_transport(sctx, beta, params):
    from .bounds.transport import transport_lower_bound
    traj = sctx.trajectory()
    ctx = sctx.si_context_for_md(sctx.cfg["model"]["T"])
    yspec = params.get("yspec", "shear-viscosity")
    return [transport_lower_bound(traj, yspec, sctx.lj_units(), ctx,
                                  max_lag=params.get("max_lag", 400))]


@evaluator("acceleration_force_bound")
def _ev_accel(sctx, beta, params):
    from .bounds.motion import acceleration_force_bound
    from .md.analysis import local_statistics
    traj = sctx.trajectory()
    units = sctx.lj_units()
    stats = local_statistics(traj)
    ctx = sctx.si_context_for_md(sctx.cfg["model"]["T"])
    si_stats = {
        "v2": stats["v2"] * units.velocity ** 2,
        "v4": stats["v4"] * units.velocity ** 4,
        "a2": stats["a2"] * (units.velocity / units.time) ** 2,
        "f2": stats["f2"] * units.force ** 2,
        "Vi2": stats["Vi2"] * units.epsilon ** 2,
        "Vi_var": stats["Vi_var"] * units.epsilon ** 2,
        "Vi_norm": stats["Vi_norm_sampled"] * units.epsilon,
    }
    return [acceleration_force_bound(si_stats, d=3, mass=units.mass, ctx=ctx,
                                     interaction=params.get("interaction",
                                                            "second-moment"))]


@evaluator("force_rate_bound")
def _ev_force_rate(sctx, beta, params):
    from .bounds.motion import force_rate_bound
    from .md.analysis import acceleration_rate_statistics
    traj = sctx.trajectory()
    units = sctx.lj_units()
    ctx = sctx.si_context_for_md(sctx.cfg["model"]["T"])
    rate = acceleration_rate_statistics(traj)
    z = params.get("z") or float(np.mean(traj.neighbor_counts))
    return [force_rate_bound(rate["relative_rate_sq"] / units.time ** 2, z=z, d=3,
                             ctx=ctx)]


@evaluator("speed_displacement_bound")
def _ev_speed(sctx, beta, params):
    from .bounds.motion import displacement_floor_bound
    from .md.analysis import position_variance
    traj = sctx.trajectory()
    units = sctx.lj_units()
    ctx = sctx.si_context_for_md(sctx.cfg["model"]["T"])
    var_si = position_variance(traj) * units.sigma ** 2
    return [displacement_floor_bound(3.0 * var_si, d=3, mass=units.mass, ctx=ctx,
                                     equipartition_ok=True)]


@evaluator("lyapunov_bound")
def _ev_lyapunov(sctx, beta, params):
    from .bounds.chaos import lyapunov_bound_md
    traj = sctx.trajectory()
    units = sctx.lj_units()
    ctx = sctx.si_context_for_md(sctx.cfg["model"]["T"])
    return [lyapunov_bound_md(sctx.model(), traj.positions[-1], traj.velocities[-1],
                              delta=params.get("delta", 1e-8), units=units, ctx=ctx,
                              steps=params.get("steps", 30_000),
                              seed=params.get("seed", 3))]


# ---------------------------------------------------------------------------
# config loading and validation


@dataclass
class Scenario:
    name: str
    cfg: dict


@dataclass
class RunManifest:
    version: str
    config_hash: str
    scenarios: list = field(default_factory=list)  # (name, wall_clock, [BoundReport])

    def all_reports(self):
        for name, _, reports in self.scenarios:
            for beta, rep in reports:
                yield name, beta, rep

    def to_dict(self):
        return {
            "version": self.version,
            "config_hash": self.config_hash,
            "scenarios": [
                {"name": name, "wall_clock": wall,
                 "reports": [{"beta": beta, **rep.to_dict()} for beta, rep in reports]}
                for name, wall, reports in self.scenarios
            ],
        }


def canonical_config_hash(cfg) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _require(cond, path, message):
    if not cond:
        raise ConfigError(f"{path}: {message}")


def load_config(path_or_dict):
    """Parse and validate a scenario config; returns the list of Scenario.

    Validation errors name the offending config path; unknown evaluator names
    list the valid ones.  Defaults are filled in place and echoed back on the
    returned scenarios.
    """
    if isinstance(path_or_dict, (str, pathlib.Path)):
        with open(path_or_dict, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    else:
        cfg = path_or_dict
    _require(isinstance(cfg, dict), "$", "config must be a JSON object")
    _require("scenarios" in cfg, "$", "missing 'scenarios' list")
    scenarios = []
    seen = set()
    for k, sc in enumerate(cfg["scenarios"]):
        path = f"$.scenarios[{k}]"
        _require(isinstance(sc, dict), path, "scenario must be an object")
        _require("name" in sc, path, "missing 'name'")
        _require(sc["name"] not in seen, path + ".name", "duplicate scenario name")
        seen.add(sc["name"])
        _require("evaluators" in sc and sc["evaluators"], path,
                 "missing non-empty 'evaluators' list")
        sc.setdefault("units", "natural")
        _require(sc["units"] in ("natural", "si"), path + ".units",
                 "units must be 'natural' or 'si'")
        grids = sc.setdefault("grids", {})
        grids.setdefault("beta", [1.0])
        _require(len(grids["beta"]) > 0, path + ".grids.beta", "grid must be nonempty")
        for j, ev in enumerate(sc["evaluators"]):
            evp = f"{path}.evaluators[{j}]"
            _require(isinstance(ev, dict) and "name" in ev, evp,
                     "evaluator entry needs a 'name'")
            _require(ev["name"] in EVALUATORS, evp + ".name",
                     f"unknown evaluator {ev['name']!r}; valid names: "
                     + ", ".join(sorted(EVALUATORS)))
        model = sc.get("model", {})
        if model.get("kind") == "lj_md":
            _require("seed" in model, path + ".model.seed",
                     "a seed is mandatory when a Langevin thermostat is used")
            _require("T" in model, path + ".model.T", "missing target temperature")
            _require("n" in model and "density" in model, path + ".model",
                     "lj_md needs 'n' and 'density'")
        scenarios.append(Scenario(name=sc["name"], cfg=sc))
    return scenarios, canonical_config_hash(cfg)


def _run_scenario(scenario: Scenario):
    sctx = ScenarioContext(scenario.cfg)
    reports = []
    t0 = time.perf_counter()
    for beta in scenario.cfg["grids"]["beta"]:
        for ev in scenario.cfg["evaluators"]:
            fn = EVALUATORS[ev["name"]]
            params = {k: v for k, v in ev.items() if k != "name"}
            try:
                for rep in fn(sctx, beta, params):
                    reports.append((beta, rep))
            except Exception as exc:  # noqa: BLE001 - error becomes a report
                rep = BoundReport(name=ev["name"], lhs=0.0, rhs=0.0,
                                  status="error",
                                  metadata={"error": f"{type(exc).__name__}: {exc}"})
                rep.satisfied = None
                reports.append((beta, rep))
    wall = time.perf_counter() - t0
    return scenario.name, wall, reports


def run(scenarios, config_hash="", parallelism=1) -> RunManifest:
    """Execute all scenarios; fan-out is across scenarios only."""
    manifest = RunManifest(version=__version__, config_hash=config_hash)
    if parallelism <= 1 or len(scenarios) <= 1:
        results = [_run_scenario(s) for s in scenarios]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_run_scenario, scenarios))
    manifest.scenarios = sorted(results, key=lambda item: item[0])
    return manifest


def exit_status(manifest: RunManifest) -> int:
    """0 iff every assertable report is satisfied; errors count as failures."""
    for _, _, rep in manifest.all_reports():
        if rep.status == "error":
            return 1
        if rep.assertable and rep.satisfied is False:
            return 1
    return 0


# ---------------------------------------------------------------------------
# emission


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(manifest: RunManifest, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scenario", "bound", "beta", "lhs", "rhs", "margin",
                         "satisfied", "status", "metadata_json"])
        for name, beta, rep in manifest.all_reports():
            writer.writerow([
                name, rep.name, _fmt(float(beta)), _fmt(rep.lhs), _fmt(rep.rhs),
                _fmt(rep.margin), _fmt(rep.satisfied), rep.status,
                json.dumps(rep.metadata, sort_keys=True, separators=(",", ":")),
            ])
    return path


def emit_json(manifest: RunManifest, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


def emit(manifest: RunManifest, out_dir, formats=("csv", "json")):
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        written.append(emit_csv(manifest, out_dir / "reports.csv"))
    if "json" in formats:
        written.append(emit_json(manifest, out_dir / "manifest.json"))
    return written
