"""Built-in experiment registry, run configuration, and experiment driver."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .dynamics import Algorithm, OmwuState, max_step_size, run_trajectory
from .equilibrium import EquilibriumResult, common_equilibrium
from .errors import ConfigError, InputError
from .output import emit_csv, emit_svg_plot
from .simplex import JointState, PeriodicGame, Simplex, Trajectory

# Payoff schedules transcribed verbatim (tuples are matrix rows; index 0 is
# the matrix used at t = 0).
GAME_2X2 = (
    ((0.0, -1.0), (-1.0, 0.0)),   # even t
    ((0.0, 1.0), (1.0, 0.0)),     # odd t
)
EXP1 = (
    ((0.0, 0.75, 0.25), (1.5, 0.0, 0.0), (0.0, 0.0, 1.0)),   # even t
    ((0.0, 0.25, 0.75), (1.5, 0.0, 0.0), (0.0, 1.0, 0.0)),   # odd t
)
EXP2 = (
    ((0.0, -1.0, 1.0), (1.0, 0.0, -1.0), (-1.0, 1.0, 0.0)),  # t mod 4 = 0
    ((0.0, 1.0, -1.0), (-1.0, 0.0, 1.0), (1.0, -1.0, 0.0)),  # t mod 4 = 1
    ((1.0, -3.0, 2.0), (-2.0, 1.0, 1.0), (1.0, 2.0, -3.0)),  # t mod 4 = 2
    ((1.0, -2.0, 1.0), (-2.0, 1.0, 1.0), (1.0, 1.0, -2.0)),  # t mod 4 = 3
)
NOCOMMON3 = (
    ((0.0, -1.0, 1.0), (1.0, 0.0, -1.0), (-1.0, 1.0, 0.0)),  # t mod 3 = 0
    ((0.0, 1.0, -1.0), (-1.0, 0.0, 1.0), (1.0, -1.0, 0.0)),  # t mod 3 = 1
    ((0.0, 0.25, 0.75), (1.5, 0.0, 0.0), (0.0, 1.0, 0.0)),   # t mod 3 = 2
)

DEFAULT_STEPS = 20_000
DEFAULT_ETA_EXTRA = 0.1
DEFAULT_ETA_OMWU = 0.01


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    game: PeriodicGame
    default_algo: Algorithm
    default_eta: float
    default_steps: int
    reference_policy: str  # "solve_common" or "none"
    explicit_reference: Optional[JointState] = None


def builtin_experiments() -> List[ExperimentSpec]:
    """The four built-in schedules: the 2x2 alternating counterexample, the
    two 3x3 common-equilibrium experiments, and the 3-periodic schedule
    without a common equilibrium."""
    def spec(name, mats):
        return ExperimentSpec(
            name=name,
            game=PeriodicGame(mats),
            default_algo=Algorithm.EXTRA_MWU,
            default_eta=DEFAULT_ETA_EXTRA,
            default_steps=DEFAULT_STEPS,
            reference_policy="solve_common",
        )

    return [
        spec("game2x2", GAME_2X2),
        spec("exp1", EXP1),
        spec("exp2", EXP2),
        spec("nocommon3", NOCOMMON3),
    ]


def experiment_by_name(name: str) -> ExperimentSpec:
    for spec in builtin_experiments():
        if spec.name == name:
            return spec
    known = ", ".join(s.name for s in builtin_experiments())
    raise ConfigError(f"unknown experiment {name!r} (known: {known})", field="experiment")


def default_init(m: int, n: int) -> JointState:
    """Uniform distribution nudged by +0.05 on the last coordinate and
    renormalized, so divergence hypotheses start with p > 0."""
    def perturbed(k):
        p = np.full(k, 1.0 / k)
        p[-1] += 0.05
        return p / p.sum()

    return JointState.from_probabilities(perturbed(m), perturbed(n))


@dataclass
class RunConfig:
    experiment: Optional[str] = None
    matrices: Optional[list] = None
    period: Optional[int] = None
    algo: Optional[str] = None
    eta: Optional[float] = None
    steps: Optional[int] = None
    record_every: Optional[int] = None
    init: Optional[list] = None       # [probs_x1, probs_x2]
    init_prev: Optional[list] = None  # [probs_x1, probs_x2] for x^{-1}
    seed: Optional[int] = None
    out_csv: Optional[str] = None
    out_svg: Optional[str] = None
    log_y: bool = False


_CONFIG_FIELDS = {
    "experiment", "matrices", "period", "algo", "eta", "steps", "record_every",
    "init", "init_prev", "seed", "out_csv", "out_svg",
}


def parse_config(path: str) -> RunConfig:
    """Parse and validate a JSON run configuration; unknown fields and
    schema violations are rejected with the offending field named."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"unknown config field {sorted(unknown)[0]!r}",
                          field=sorted(unknown)[0])

    cfg = RunConfig(**raw)
    has_inline = cfg.matrices is not None
    if (cfg.experiment is None) == (not has_inline):
        raise ConfigError("exactly one of 'experiment' or 'matrices' is required",
                          field="experiment")
    if has_inline:
        try:
            game = PeriodicGame(tuple(cfg.matrices))
        except (InputError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid matrices: {exc}", field="matrices") from exc
        if cfg.period is not None and cfg.period != game.period:
            raise ConfigError(
                f"period {cfg.period} does not match the {game.period} matrices",
                field="period")
    if cfg.algo is not None:
        try:
            Algorithm(cfg.algo)
        except ValueError as exc:
            raise ConfigError(f"algo must be one of mwu|omwu|extra, got {cfg.algo!r}",
                              field="algo") from exc
    if cfg.eta is not None and (not isinstance(cfg.eta, (int, float)) or cfg.eta <= 0):
        raise ConfigError(f"eta must be a positive number, got {cfg.eta!r}", field="eta")
    if cfg.steps is not None and (not isinstance(cfg.steps, int) or cfg.steps < 1):
        raise ConfigError(f"steps must be a positive integer, got {cfg.steps!r}",
                          field="steps")
    if cfg.record_every is not None and (not isinstance(cfg.record_every, int)
                                         or cfg.record_every < 1):
        raise ConfigError("record_every must be a positive integer", field="record_every")
    if cfg.seed is not None and (not isinstance(cfg.seed, int) or cfg.seed < 0):
        raise ConfigError("seed must be a nonnegative integer", field="seed")
    for name in ("init", "init_prev"):
        value = getattr(cfg, name)
        if value is None:
            continue
        try:
            _init_state(value)
        except (InputError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid {name}: {exc}", field=name) from exc
    return cfg


def _init_state(pair) -> JointState:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise InputError("expected a pair [probs_x1, probs_x2]")
    return JointState.from_probabilities(pair[0], pair[1])


def resolve_game(cfg: RunConfig):
    """The (game, spec-or-None) pair named by a config."""
    if cfg.experiment is not None:
        spec = experiment_by_name(cfg.experiment)
        return spec.game, spec
    return PeriodicGame(tuple(cfg.matrices)), None


def run_experiment(cfg: RunConfig):
    """Resolve defaults, solve for a reference when requested, run, and
    write any requested files.

    Returns (trajectory, equilibrium-or-None, {kind: path}).
    """
    game, spec = resolve_game(cfg)
    algo = Algorithm(cfg.algo) if cfg.algo else (
        spec.default_algo if spec else Algorithm.EXTRA_MWU)
    if cfg.eta is not None:
        eta = float(cfg.eta)
    elif algo is Algorithm.OMWU:
        eta = DEFAULT_ETA_OMWU
    else:
        eta = spec.default_eta if spec else DEFAULT_ETA_EXTRA
    steps = cfg.steps if cfg.steps is not None else (
        spec.default_steps if spec else DEFAULT_STEPS)

    reference = None
    equilibrium = None
    policy = spec.reference_policy if spec else "solve_common"
    if spec and spec.explicit_reference is not None:
        reference = spec.explicit_reference
    elif policy == "solve_common":
        equilibrium = common_equilibrium(game)
        if equilibrium is not None:
            reference = equilibrium.joint

    if cfg.init is not None:
        current = _init_state(cfg.init)
    elif cfg.seed is not None:
        rng = np.random.default_rng(cfg.seed)
        current = JointState.from_probabilities(
            rng.dirichlet(np.ones(game.m)), rng.dirichlet(np.ones(game.n)))
    else:
        current = default_init(game.m, game.n)
    previous = _init_state(cfg.init_prev) if cfg.init_prev is not None else current
    init = OmwuState(current, previous)

    if algo is Algorithm.EXTRA_MWU:
        bound = max_step_size(game)
        if eta >= bound:
            print(f"warning: eta {eta} is not below the step-size bound {bound:.6g}; "
                  "convergence is not guaranteed", file=sys.stderr)

    traj = run_trajectory(game, algo, init, eta, steps,
                          record_every=cfg.record_every, reference=reference)
    paths = {}
    if cfg.out_csv:
        emit_csv(traj, cfg.out_csv)
        paths["csv"] = cfg.out_csv
    if cfg.out_svg:
        emit_svg_plot(_svg_series(traj, cfg.log_y), cfg.out_svg, log_y=cfg.log_y)
        paths["svg"] = cfg.out_svg
    return traj, equilibrium, paths


def _svg_series(traj: Trajectory, log_y: bool):
    ts = traj.times
    if log_y and traj.reference is not None:
        return [("KL(eq, x^t)", list(zip(ts.tolist(), traj.kl_to_ref.tolist())))]
    series = []
    p1, p2 = traj.probabilities1, traj.probabilities2
    for i in range(p1.shape[1]):
        series.append((f"x1_{i + 1}", list(zip(ts.tolist(), p1[:, i].tolist()))))
    for j in range(p2.shape[1]):
        series.append((f"x2_{j + 1}", list(zip(ts.tolist(), p2[:, j].tolist()))))
    return series
