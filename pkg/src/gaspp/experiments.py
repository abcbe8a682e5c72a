"""Run experiments, write their artifacts and replay the benchmark figures.

Artifacts of one run live in a directory:

``trajectory.csv``
    Header ``k,agent,coord_index,prob,pred_prob,grad,gamma_k``. One row per
    recorded iteration, agent and action. ``prob`` and ``pred_prob`` cover
    the full probability vector including the dependent last action;
    ``grad`` is empty for that last action, ``pred_prob`` is empty when no
    agent predicts and ``gamma_k`` is empty for non-predicting agents.
    Numbers use 17 significant digits, so the reduced strategies re-read
    bit-exactly.
``summary.json``
    Convergence flags, iteration count, final strategies, exploitability,
    classification, one condition report per agent and, for 2x2 games, the
    linearised dynamics with its predicted outcome.
"""
import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from gaspp.analysis2x2 import analyze, predict_outcome
from gaspp.config import ExperimentConfig, condition_reports
from gaspp.errors import InvalidInputError
from gaspp.game import BimatrixGame, classify, full_strategy
from gaspp.learners import Algorithm, LearnerConfig, StepSizes, run, run_nplayer
from gaspp.registry import BENCHMARKS

CSV_HEADER = ("k", "agent", "coord_index", "prob", "pred_prob", "grad", "gamma_k")
OUT_DIR_ENV = "GASPP_OUT_DIR"
SUITES = ("fig2", "fig3", "fig4", "fig5")


def default_out_dir():
    return Path(os.environ.get(OUT_DIR_ENV, "gaspp_out"))


def _fmt(x):
    return format(float(x), ".17g")


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def trajectory_csv(traj, predicting):
    """Render a trajectory as CSV text; ``predicting[i]`` says whether agent ``i`` has a prediction length."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in range(len(traj)):
        k = int(traj.k[r])
        for i, strat in enumerate(traj.strategies):
            x = full_strategy(strat[r])
            pred = traj.predictions[i][r]
            pred = None if np.all(np.isnan(pred)) else full_strategy(pred)
            grad = traj.gradients[i][r]
            gamma = _fmt(traj.gamma[r, i]) if predicting[i] else ""
            last = len(x) - 1
            for c in range(len(x)):
                w.writerow((
                    k, i, c, _fmt(x[c]),
                    "" if pred is None else _fmt(pred[c]),
                    "" if c == last else _fmt(grad[c]),
                    gamma,
                ))
    return buf.getvalue()


def read_trajectory_csv(path):
    """Parse a trajectory CSV into one dict per agent.

    Each dict has ``k`` (records,), ``prob`` and ``pred_prob`` (records,
    actions) and ``grad`` (records, actions - 1); missing values are NaN.
    """
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise InvalidInputError(f"unexpected CSV header {header}")
        for k, agent, c, prob, pred, grad, gamma in reader:
            rows.setdefault(int(agent), []).append(
                (int(k), int(c), float(prob), float(pred or "nan"), float(grad or "nan"), float(gamma or "nan"))
            )
    out = {}
    for agent, entries in sorted(rows.items()):
        arr = np.array(entries)
        actions = int(arr[:, 1].max()) + 1
        arr = arr.reshape(-1, actions, 6)
        out[agent] = {
            "k": arr[:, 0, 0].astype(np.int64),
            "prob": arr[:, :, 2],
            "pred_prob": arr[:, :, 3],
            "grad": arr[:, :-1, 4],
            "gamma_k": arr[:, 0, 5],
        }
    return out


@dataclass
class ExperimentResult:
    status: int
    trajectory: object
    summary: object
    document: dict
    directory: Path

    @property
    def csv_path(self):
        return self.directory / "trajectory.csv"

    @property
    def json_path(self):
        return self.directory / "summary.json"


def simulate(config):
    """Run the learners of ``config`` and return ``(trajectory, summary)`` without writing anything."""
    kwargs = dict(tol=config.tol_converge, record_stride=config.record_stride, window=config.window)
    if config.is_bimatrix:
        return run(config.game, config.learners, config.initial, config.max_iters, **kwargs)
    return run_nplayer(config.game, config.learners, config.initial, config.max_iters, **kwargs)


def summary_document(config, summary):
    game = config.game
    doc = {
        "game": game.name,
        "algorithms": [c.algorithm.value for c in config.learners],
        "step_sizes": [
            {"eta": c.sizes.eta, "gamma0": c.sizes.gamma0, "mu": c.sizes.mu} for c in config.learners
        ],
        "converged": summary.converged,
        "terminated": summary.terminated,
        "stop_reason": summary.stop_reason,
        "iterations": summary.iterations,
        "final_strategies": [full_strategy(x).tolist() for x in summary.final],
        "exploitability": summary.exploitability,
        "gamma_final": list(summary.gamma_final),
        "conditions": [r.as_dict() for r in condition_reports(game, config.learners)],
        "classification": None,
        "analysis2x2": None,
    }
    if isinstance(game, BimatrixGame):
        cls = classify(game)
        doc["classification"] = {"tags": sorted(cls.tags), "antiparallel_delta": cls.antiparallel_delta}
        gammas = [c.sizes.gamma0 for c in config.learners if c.sizes.gamma0 is not None]
        if game.shape == (2, 2) and gammas:
            dyn = analyze(game, gammas[0])
            initial = (float(config.initial[0][0]), float(config.initial[1][0]))
            pred = predict_outcome(dyn, initial)
            doc["analysis2x2"] = {
                **dyn.as_dict(),
                "prediction": pred.tag,
                "predicted_point": list(pred.point) if pred.point is not None else None,
            }
    return doc


def run_experiment(config, out_dir=None):
    """Run ``config`` and write ``trajectory.csv`` and ``summary.json``.

    Artifacts go to ``config.output``, else ``out_dir``, else
    ``$GASPP_OUT_DIR/<game name>``. Returns an :class:`ExperimentResult`
    whose ``status`` is 0.
    """
    directory = config.output or out_dir or default_out_dir() / (config.game.name or "game")
    directory = Path(directory)
    traj, summary = simulate(config)
    predicting = [c.algorithm.predicts for c in config.learners]
    doc = summary_document(config, summary)
    atomic_write(directory / "trajectory.csv", trajectory_csv(traj, predicting))
    atomic_write(directory / "summary.json", json.dumps(doc, indent=2) + "\n")
    return ExperimentResult(0, traj, summary, doc, directory)


# -- figure suites ------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    run: str
    criterion: str
    observed: str
    passed: bool

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    results: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    def table(self):
        width = max(len(c.run) for c in self.checks)
        lines = [f"{self.suite}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            mark = "pass" if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.run:<{width}}  {c.criterion}  ({c.observed})")
        return "\n".join(lines)

    def as_dict(self):
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [vars(c) for c in self.checks],
        }


def _learner(alg, eta, gamma0):
    return LearnerConfig(Algorithm(alg), StepSizes(eta, gamma0))


def _config(game_name, learners, initial, **kw):
    game = BENCHMARKS[game_name].game
    if isinstance(learners, LearnerConfig):
        learners = (learners,) * (2 if isinstance(game, BimatrixGame) else game.players)
    return ExperimentConfig(
        game=game,
        learners=tuple(learners),
        initial=tuple(np.atleast_1d(np.asarray(x, dtype=float)) for x in initial),
        **kw,
    )


FIG2_GAMES = ("prisoners_dilemma", "chicken", "battle_of_sexes", "rock_paper_scissors")
FIG2_INITIALS = {"a": ([0.7, 0.3], [0.3, 0.7]), "b": ([0.3, 0.7], [0.7, 0.3])}
FIG3_INITIAL = ([0.1, 0.8], [0.8, 0.1])
FIG4_INITIAL = ([0.8], [0.1, 0.8])
FIG5_INITIAL = ([0.1], [0.4], [0.7])


def _fig2_runs():
    for game in FIG2_GAMES:
        for tag, (row, col) in FIG2_INITIALS.items():
            g = BENCHMARKS[game].game
            init = (_pad(row, g.m - 1), _pad(col, g.n - 1))
            yield f"{game}_{tag}", _config(game, _learner("GASPP", 0.001, 0.1), init)


def _pad(x, d):
    """First ``d`` entries of ``x`` as a reduced strategy, zero-padded.

    A two-action policy ``(p, 1 - p)`` becomes ``[p]``; on three actions it
    is the reduced strategy ``[p, 1 - p]`` (last action unused).
    """
    out = np.zeros(d)
    k = min(d, len(x))
    out[:k] = x[:k]
    return out


def _check_fig2(name, cfg, summary):
    checks = [Check(name, "converged", summary.stop_reason, summary.converged),
              Check(name, "exploitability <= 1e-4", f"{summary.exploitability:.3g}",
                    summary.exploitability <= 1e-4)]
    if name.startswith("rock_paper_scissors"):
        dev = max(np.max(np.abs(full_strategy(x) - 1.0 / 3.0)) for x in summary.final)
        checks.append(Check(name, "limit within 1e-3 of uniform", f"{dev:.3g}", dev <= 1e-3))
    return checks


def _fig3_runs():
    for alg in ("GASPP", "GIGAWOLF", "IGAPP"):
        gamma0 = None if alg == "GIGAWOLF" else 3.0
        yield f"shapleys_game_{alg.lower()}", _config(
            "shapleys_game", _learner(alg, 0.001, gamma0), FIG3_INITIAL, allow_condition_override=True,
        )


AMPLITUDE_WINDOW = 100_000


def oscillation_amplitude(traj, summary, last=AMPLITUDE_WINDOW):
    """Largest peak-to-peak range of any action probability over the last ``last`` iterations.

    Computed from the recorded iterations, so a coarse stride underestimates it.
    """
    keep = traj.k >= summary.iterations - last
    if not np.any(keep):
        return 0.0
    amp = 0.0
    for s in traj.strategies:
        full = np.column_stack([s[keep], 1.0 - s[keep].sum(axis=1)])
        amp = max(amp, float(np.max(full.max(axis=0) - full.min(axis=0))))
    return amp


def _check_fig3(name, cfg, summary, traj):
    if "gigawolf" in name:
        amp = oscillation_amplitude(traj, summary)
        return [Check(name, "not converged", summary.stop_reason, not summary.converged),
                Check(name, "oscillation amplitude > 0.05 over the last 1e5 iterations",
                      f"{amp:.3g}", amp > 0.05)]
    checks = [Check(name, "converged", summary.stop_reason, summary.converged),
              Check(name, "exploitability <= 1e-2", f"{summary.exploitability:.3g}",
                    summary.exploitability <= 1e-2)]
    if "gaspp" in name:
        dev = max(np.max(np.abs(x - 1.0 / 3.0)) for x in summary.final)
        checks.append(Check(name, "limit within 1e-2 of uniform", f"{dev:.3g}", dev <= 1e-2))
    return checks


FIG4_GAMMAS = (0.01, 0.1)


def _fig4_runs():
    for gamma in FIG4_GAMMAS:
        for alg in ("GASPP", "IGAPP"):
            yield f"two_by_three_{alg.lower()}_gamma{gamma:g}", _config(
                "two_by_three", _learner(alg, 0.001, gamma), FIG4_INITIAL, allow_condition_override=True,
            )


def _check_fig4(report):
    checks = []
    igapp_off = []
    for name, (cfg, summary, _) in report.results.items():
        if "gaspp" in name:
            checks.append(Check(name, "exploitability <= 1e-4", f"{summary.exploitability:.3g}",
                                summary.exploitability <= 1e-4))
        else:
            off = summary.converged and summary.exploitability > 1e-3
            igapp_off.append(off)
            checks.append(Check(name, "info: converged to a non-equilibrium point",
                                f"{summary.stop_reason}, exploitability {summary.exploitability:.3g}", True))
    checks.append(Check("two_by_three_igapp", "converges to exploitability > 1e-3 for some gamma",
                        f"{sum(igapp_off)}/{len(igapp_off)}", any(igapp_off)))
    return checks


FIG5_TOL = 1e-6


def _fig5_runs():
    yield "three_player_matching_pennies", _config(
        "three_player_matching_pennies", _learner("GASPP", 0.001, 0.3), FIG5_INITIAL,
        tol_converge=FIG5_TOL,
    )


def _check_fig5(name, cfg, summary):
    return [Check(name, f"no convergence within {cfg.max_iters} iterations "
                        f"(step norm never below {FIG5_TOL:g} for {cfg.window} steps)",
                  f"{summary.stop_reason} after {summary.iterations}, exploitability {summary.exploitability:.3g}",
                  not summary.converged)]


_RUNS = {"fig2": _fig2_runs, "fig3": _fig3_runs, "fig4": _fig4_runs, "fig5": _fig5_runs}


def suite_configs(suite):
    """``(run name, config)`` pairs of a figure suite."""
    if suite not in _RUNS:
        raise InvalidInputError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return list(_RUNS[suite]())


def reproduce_paper(suite, out_dir=None, max_iters=None):
    """Run a figure suite, write one artifact directory per run plus ``report.json``.

    ``max_iters`` overrides every run's iteration budget. Returns a
    :class:`SuiteReport`.
    """
    root = Path(out_dir) if out_dir is not None else default_out_dir()
    root = root / suite
    report = SuiteReport(suite)
    for name, cfg in suite_configs(suite):
        cfg = replace(cfg, output=root / name)
        if max_iters is not None:
            cfg = replace(cfg, max_iters=int(max_iters))
        try:
            res = run_experiment(cfg)
        except Exception as exc:
            raise RuntimeError(f"{suite}/{name} failed: {exc}") from exc
        report.results[name] = (cfg, res.summary, res.trajectory)
        if suite == "fig2":
            report.checks += _check_fig2(name, cfg, res.summary)
        elif suite == "fig3":
            report.checks += _check_fig3(name, cfg, res.summary, res.trajectory)
        elif suite == "fig5":
            report.checks += _check_fig5(name, cfg, res.summary)
    if suite == "fig4":
        report.checks += _check_fig4(report)
    atomic_write(root / "report.json", json.dumps(report.as_dict(), indent=2) + "\n")
    return report
