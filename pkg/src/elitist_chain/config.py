"""YAML run configuration.

A problem is given either by a bitstring family::

    problem: {family: onemax, n: 4, mutation: onebit}
    problem: {family: custom, n: 3, levels: [9, 4, 1, 0], mutation: bitwise, p_mut: "1/3"}

or by an explicit kernel::

    problem:
      matrix: [["3/4", "1/2", 0, 0], [0, "1/2", "3/4", 0], [0, 0, "1/4", 1], [0, 0, 0, 0]]
      errors: [1, 2, 3, 4]
      f_opt: 4
      q0: [0, 0, 0, 1]

Numbers may be written as decimals or as ``"p/q"`` strings.
"""
from dataclasses import dataclass, replace

import yaml

from .levels import FitnessFamily, bitwise_level_chain, from_explicit, onebit_level_chain
from .triangular import TriangularKernel

DEFAULTS = {
    "label": None,
    "horizon": 35,
    "exact": False,
    "problem": None,
    "analysis": {"coefficient_offset": 0.0},
    "simulation": {"runs": 100_000, "seed": 42, "workers": 1, "path": None},
    "output": {"path": None, "format": "csv"},
    "tolerances": {"eps_diag": 1e-9, "z_threshold": 4.0},
    "report": {"digits": 3, "cutoff": 5e-4},
}

FAMILY_KEYS = {"family", "n", "mutation", "p_mut", "levels", "q0"}
EXPLICIT_KEYS = {"matrix", "errors", "f_opt", "q0"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    problem: dict
    horizon: int = 35
    runs: int = 100_000
    seed: int = 42
    workers: int = 1
    sim_path: str = None
    out: str = None
    out_format: str = "csv"
    eps_diag: float = 1e-9
    z_threshold: float = 4.0
    digits: int = 3
    cutoff: float = 5e-4
    coefficient_offset: float = 0.0
    exact: bool = False
    label: str = None

    @property
    def is_family(self):
        return "family" in self.problem

    @property
    def simulation_path(self):
        if self.sim_path:
            return self.sim_path
        return "bitstring" if self.is_family else "chain"

    def override(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def build_problem(self):
        p = self.problem
        if self.is_family:
            family = FitnessFamily(p["family"], p.get("levels"))
            mutation = p.get("mutation", "onebit")
            label = self.label or f"{family.name}-n{p['n']}-{mutation}"
            if mutation == "onebit":
                return onebit_level_chain(family, int(p["n"]), q0=p.get("q0"), exact=self.exact, label=label)
            if mutation == "bitwise":
                if "p_mut" not in p:
                    raise ConfigError("bitwise mutation needs problem.p_mut")
                return bitwise_level_chain(family, int(p["n"]), p["p_mut"], q0=p.get("q0"), exact=self.exact,
                                           eps_diag=self.eps_diag, label=label)
            raise ConfigError(f"unknown mutation {mutation!r}; use onebit or bitwise")
        kernel = TriangularKernel.from_rows(p["matrix"], exact=self.exact)
        return from_explicit(kernel, p["errors"], p["f_opt"], p.get("q0"),
                             label=self.label or "explicit", eps_diag=self.eps_diag)


def _section(raw, name):
    sec = raw.get(name) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    unknown = set(sec) - set(DEFAULTS[name]) - ({"horizon"} if name in ("analysis", "simulation") else set())
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    return {**DEFAULTS[name], **sec}


def parse_config(raw):
    """Validate a decoded YAML mapping and return a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping")
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    problem = raw.get("problem")
    if not isinstance(problem, dict):
        raise ConfigError("missing 'problem' mapping")
    has_family = "family" in problem
    has_matrix = "matrix" in problem
    if has_family == has_matrix:
        raise ConfigError("problem needs exactly one of 'family' (with n) or 'matrix' (with errors, f_opt)")
    allowed = FAMILY_KEYS if has_family else EXPLICIT_KEYS
    if set(problem) - allowed:
        raise ConfigError(f"unexpected problem keys: {sorted(set(problem) - allowed)}")
    missing = ({"n"} if has_family else {"errors", "f_opt"}) - set(problem)
    if missing:
        raise ConfigError(f"problem is missing {sorted(missing)}")

    analysis = _section(raw, "analysis")
    sim = _section(raw, "simulation")
    out = _section(raw, "output")
    tol = _section(raw, "tolerances")
    rep = _section(raw, "report")

    horizons = {h for h in (raw.get("horizon"), analysis.get("horizon"), sim.get("horizon")) if h is not None}
    if len(horizons) > 1:
        raise ConfigError(f"horizon mismatch between blocks: {sorted(horizons)}")
    horizon = horizons.pop() if horizons else DEFAULTS["horizon"]

    try:
        cfg = RunConfig(
            problem=problem,
            horizon=int(horizon),
            runs=int(sim["runs"]),
            seed=int(sim["seed"]),
            workers=int(sim["workers"]),
            sim_path=sim["path"],
            out=out["path"],
            out_format=out["format"],
            eps_diag=float(tol["eps_diag"]),
            z_threshold=float(tol["z_threshold"]),
            digits=int(rep["digits"]),
            cutoff=float(rep["cutoff"]),
            coefficient_offset=float(analysis["coefficient_offset"]),
            exact=bool(raw.get("exact", False)),
            label=raw.get("label"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad numeric field: {exc}") from exc
    check(cfg)
    return cfg


def check(cfg):
    if cfg.horizon < 1:
        raise ConfigError("horizon must be >= 1")
    if cfg.runs < 1:
        raise ConfigError("simulation.runs must be >= 1")
    if not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("simulation.seed must be an unsigned 64-bit integer")
    if cfg.workers < 1:
        raise ConfigError("simulation.workers must be >= 1")
    if cfg.sim_path not in (None, "bitstring", "chain"):
        raise ConfigError("simulation.path must be 'bitstring' or 'chain'")
    if cfg.sim_path == "bitstring" and not cfg.is_family:
        raise ConfigError("bitstring simulation needs a family problem")
    if cfg.out_format != "csv":
        raise ConfigError("only csv output is supported")
    if cfg.eps_diag < 0 or cfg.z_threshold <= 0:
        raise ConfigError("tolerances must be positive")
    if cfg.digits < 0 or cfg.cutoff < 0:
        raise ConfigError("report.digits and report.cutoff must be nonnegative")
    return cfg


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    return parse_config(raw)


def defaults_yaml():
    doc = {k: v for k, v in DEFAULTS.items() if k != "problem"}
    doc["problem"] = {"family": "onemax", "n": 4, "mutation": "onebit", "q0": "worst"}
    return yaml.safe_dump(doc, sort_keys=False)
