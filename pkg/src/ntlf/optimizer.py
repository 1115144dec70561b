"""Filter synthesis by penalized differential evolution.

The search runs over the 2N free coefficients ``[C_1..C_N, S_1..S_N]``.
``C_0`` is eliminated so that both ends always match the port impedance.
Mask and width violations enter as squared-margin penalties. Widths outside
the microstrip validity window get a flat ``1e6 + excess`` so the objective
stays finite everywhere in the box.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .analysis import (
    DEFAULT_SECTIONS_PER_LAMBDA,
    FourierWidthProfile,
    FrequencyGrid,
    SParameterSweep,
    analyze,
    choose_num_sections,
    fourier_basis,
    section_midpoints,
)
from .errors import InvalidArgumentError
from .microstrip import VALIDITY_WINDOW, Substrate
from .objective import (
    DEFAULT_Z_SAMPLES,
    ConstraintReport,
    FilterSpec,
    constraint_report,
    electrical_margins,
    enforce_end_width,
    error_function,
    width_margin_of,
)

log = logging.getLogger(__name__)

OUT_OF_WINDOW_PENALTY = 1e6


@dataclass(frozen=True)
class PenaltyWeights:
    passband: float = 100.0
    stopband: float = 100.0
    transition: float = 100.0
    width: float = 1000.0

    def apply(self, report: ConstraintReport, slack_db: float = 0.0, slack_width: float = 0.0) -> float:
        """Weighted squared shortfall of each margin below its slack (zero by default)."""
        return (
            self.passband * max(0.0, slack_db - report.passband_margin_db) ** 2
            + self.stopband * max(0.0, slack_db - report.stopband_margin_db) ** 2
            + self.transition * max(0.0, slack_db - report.transition_margin_db) ** 2
            + self.width * max(0.0, slack_width - report.width_margin) ** 2
        )


@dataclass(frozen=True)
class OptimizerOptions:
    """Search settings.

    ``mutation`` and ``crossover`` are the DE scale factor and binomial
    crossover rate. ``workers > 1`` evaluates each generation on a thread
    pool; results do not depend on it.

    A squared exterior penalty is flat at the constraint boundary, so its
    minimum sits slightly outside any active constraint. The search therefore
    penalizes margins below ``slack_db`` / ``slack_width`` instead of below
    zero. Feasibility is always judged on the true margins.

    The global phase runs at ``search_sections_per_lambda``; the final
    population is rescored and the local polish (``refine_evals`` reserved
    evaluations) runs at full resolution.
    """

    order_n: int = 5
    population: int = 40
    max_evals: int = 100000
    rng_seed: int = 0
    penalty_weights: PenaltyWeights = field(default_factory=PenaltyWeights)
    coeff_bounds: tuple[float, float] = (-2.0, 2.0)
    local_refine: bool = True
    mutation: float = 0.7
    crossover: float = 0.9
    stall_generations: int = 20
    stall_tolerance: float = 1e-5
    search_sections_per_lambda: float = 50.0
    slack_db: float = 0.05
    slack_width: float = 0.01
    refine_evals: int = 5000
    workers: int = 1

    def __post_init__(self):
        if self.order_n < 1:
            raise InvalidArgumentError("order_n must be >= 1")
        if self.population < 8:
            raise InvalidArgumentError("population must be >= 8")
        if not self.max_evals > self.population:
            raise InvalidArgumentError("max_evals must exceed population")
        lo, hi = self.coeff_bounds
        if not lo < hi:
            raise InvalidArgumentError("coeff_bounds must satisfy lo < hi")
        if not (0.0 < self.mutation <= 2.0 and 0.0 <= self.crossover <= 1.0):
            raise InvalidArgumentError("mutation must be in (0, 2] and crossover in [0, 1]")
        if self.workers < 1:
            raise InvalidArgumentError("workers must be >= 1")
        if not self.search_sections_per_lambda >= 10:
            raise InvalidArgumentError("search_sections_per_lambda must be >= 10")
        if self.slack_db < 0 or self.slack_width < 0 or self.refine_evals < 0:
            raise InvalidArgumentError("slacks and refine_evals must be non-negative")


@dataclass(frozen=True)
class Evaluation:
    value: float
    error: float
    report: ConstraintReport | None

    @property
    def feasible(self) -> bool:
        return self.report is not None and self.report.passed


@dataclass(frozen=True)
class SynthesisResult:
    profile: FourierWidthProfile
    error_value: float
    report: ConstraintReport
    evals_used: int
    feasible: bool
    history: tuple[float, ...]
    objective_value: float
    sweep: SParameterSweep


class FilterProblem:
    """Penalized objective bound to one spec, substrate, grid and section count."""

    def __init__(
        self,
        spec: FilterSpec,
        substrate: Substrate,
        grid: FrequencyGrid,
        weights: PenaltyWeights | None = None,
        m: int | None = None,
        z_samples: int = DEFAULT_Z_SAMPLES,
        sections_per_lambda: float = DEFAULT_SECTIONS_PER_LAMBDA,
        slack_db: float = 0.0,
        slack_width: float = 0.0,
    ):
        self.spec = spec
        self.slack_db = slack_db
        self.slack_width = slack_width
        self.substrate = substrate
        self.grid = grid
        self.weights = weights or PenaltyWeights()
        self.wh0 = spec.end_width(substrate)
        self.m = m or choose_num_sections(spec.d, grid.f_max, substrate.eps_r, sections_per_lambda)
        self.z_samples = z_samples
        self._z = np.linspace(0.0, spec.d, z_samples)
        self._mid = section_midpoints(spec.d, self.m)

    def profile(self, free) -> FourierWidthProfile:
        return enforce_end_width(free, self.spec, self.substrate, wh0=self.wh0)

    def evaluate(self, free) -> Evaluation:
        profile = self.profile(free)
        wh = profile.evaluate(self._z)
        wh_mid = profile.evaluate(self._mid)
        lo, hi = VALIDITY_WINDOW
        excess = max(
            lo - min(wh.min(), wh_mid.min()),
            max(wh.max(), wh_mid.max()) - hi,
            0.0,
        )
        if excess > 0.0:
            return Evaluation(OUT_OF_WINDOW_PENALTY + excess, math.inf, None)
        sweep = analyze(profile, self.substrate, self.grid, self.spec.z0, self.m)
        err = error_function(sweep, self.spec)
        p, s, t = electrical_margins(sweep.frequencies, sweep.s21_db(), self.spec)
        report = ConstraintReport(p, s, t, width_margin_of(wh, self.spec))
        return Evaluation(err + self.weights.apply(report, self.slack_db, self.slack_width), err, report)

    def __call__(self, free) -> float:
        return self.evaluate(free).value


def penalized_objective(
    free_coeffs,
    spec: FilterSpec,
    substrate: Substrate,
    grid: FrequencyGrid,
    weights: PenaltyWeights | None = None,
    m: int | None = None,
) -> float:
    """Error function plus weighted squared constraint violations."""
    return FilterProblem(spec, substrate, grid, weights, m)(free_coeffs)


def _default_grid(spec: FilterSpec, n_points: int) -> FrequencyGrid:
    return FrequencyGrid.uniform(spec.f_max, n_points)


def verify(
    profile: FourierWidthProfile,
    spec: FilterSpec,
    substrate: Substrate,
    grid: FrequencyGrid | None = None,
    m: int | None = None,
    sections_per_lambda: float = DEFAULT_SECTIONS_PER_LAMBDA,
    z_samples: int = DEFAULT_Z_SAMPLES,
) -> tuple[ConstraintReport, float, SParameterSweep]:
    """Analyze ``profile`` and check it against ``spec``.

    Returns ``(report, error_value, sweep)``.
    """
    grid = grid or _default_grid(spec, 120)
    sweep = analyze(profile, substrate, grid, spec.z0, m, sections_per_lambda)
    return constraint_report(sweep, profile, spec, z_samples), error_function(sweep, spec), sweep


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    @property
    def left(self) -> int:
        return self.limit - self.used


def _evaluate_all(problem: FilterProblem, xs: np.ndarray, pool) -> list[Evaluation]:
    if pool is None:
        return [problem.evaluate(x) for x in xs]
    return list(pool.map(problem.evaluate, xs))


def _initial_population(problem: FilterProblem, opts: OptimizerOptions, rng: np.random.Generator) -> np.ndarray:
    """Uniform draws from the box, keeping those whose widths stay in the validity window.

    Rejection only costs a width evaluation, not an analysis. If the window
    is too hard to hit, the remaining members are plain box draws.
    """
    dim = 2 * opts.order_n
    lo, hi = opts.coeff_bounds
    z = np.linspace(0.0, problem.spec.d, 201)
    basis = fourier_basis(z, problem.spec.d, opts.order_n)
    log_lo, log_hi = (math.log(v) for v in VALIDITY_WINDOW)
    ln_wh0 = math.log(problem.wh0)
    kept: list[np.ndarray] = []
    for _ in range(50):
        x = rng.uniform(lo, hi, size=(20000, dim))
        coeffs = np.hstack([ln_wh0 - x[:, : opts.order_n].sum(axis=1, keepdims=True), x])
        log_w = coeffs @ basis.T
        kept.extend(x[np.all((log_w > log_lo) & (log_w < log_hi), axis=1)])
        if len(kept) >= opts.population:
            break
    missing = opts.population - len(kept)
    if missing > 0:
        log.warning("only %d initial members inside the validity window", len(kept))
        kept.extend(rng.uniform(lo, hi, size=(missing, dim)))
    return np.array(kept[: opts.population])


def _differential_evolution(problem: FilterProblem, opts: OptimizerOptions, budget: _Budget, pool, reserve: int):
    rng = np.random.default_rng(opts.rng_seed)
    dim = 2 * opts.order_n
    lo, hi = opts.coeff_bounds
    npop = opts.population

    pop = _initial_population(problem, opts, rng)
    evals = _evaluate_all(problem, pop, pool)
    budget.used += npop
    values = np.array([e.value for e in evals])

    best = int(np.argmin(values))
    history = [float(values[best])]
    idx = np.arange(npop)

    while budget.left >= npop + reserve:
        # rand/1/bin: three distinct donors, none equal to the target
        donors = np.empty((npop, 3), dtype=int)
        for i in range(npop):
            donors[i] = rng.choice(np.delete(idx, i), size=3, replace=False)
        mutant = pop[donors[:, 0]] + opts.mutation * (pop[donors[:, 1]] - pop[donors[:, 2]])
        # out-of-box components move halfway from the target toward the violated bound
        mutant = np.where(mutant < lo, 0.5 * (pop + lo), mutant)
        mutant = np.where(mutant > hi, 0.5 * (pop + hi), mutant)
        cross = rng.random((npop, dim)) < opts.crossover
        cross[idx, rng.integers(dim, size=npop)] = True
        trial = np.where(cross, mutant, pop)

        trial_evals = _evaluate_all(problem, trial, pool)
        budget.used += npop
        for i, ev in enumerate(trial_evals):
            if ev.value <= values[i]:
                pop[i] = trial[i]
                values[i] = ev.value
                evals[i] = ev

        best = int(np.argmin(values))
        history.append(float(values[best]))
        window = opts.stall_generations
        if (
            evals[best].feasible
            and len(history) > window
            and history[-1 - window] - history[-1] < opts.stall_tolerance
        ):
            log.debug("stalled after %d generations", len(history) - 1)
            break
        if len(history) % 25 == 0:
            log.info("generation %d: best %.6g (%d evals)", len(history) - 1, history[-1], budget.used)

    return pop, evals, history


class _Archive:
    """Best point by objective value, and best feasible point by error."""

    def __init__(self):
        self.best = None
        self.best_feasible = None

    def offer(self, x: np.ndarray, ev: Evaluation) -> None:
        if self.best is None or ev.value < self.best[1].value:
            self.best = (np.array(x, copy=True), ev)
        if ev.feasible and (self.best_feasible is None or ev.error < self.best_feasible[1].error):
            self.best_feasible = (np.array(x, copy=True), ev)

    def choice(self):
        return self.best_feasible or self.best


def _refine(problem: FilterProblem, x0: np.ndarray, opts: OptimizerOptions, budget: _Budget, archive: _Archive):
    def fun(x):
        if budget.left <= 0:
            return math.inf
        budget.used += 1
        ev = problem.evaluate(x)
        archive.offer(x, ev)
        return ev.value

    lo, hi = opts.coeff_bounds
    minimize(
        fun,
        x0,
        method="Nelder-Mead",
        bounds=[(lo, hi)] * x0.size,
        options={"maxfev": max(budget.left, 1), "xatol": 1e-7, "fatol": 1e-9, "adaptive": True},
    )


def synthesize(
    spec: FilterSpec,
    substrate: Substrate,
    options: OptimizerOptions | None = None,
    grid: FrequencyGrid | None = None,
    sections_per_lambda: float = DEFAULT_SECTIONS_PER_LAMBDA,
    z_samples: int = DEFAULT_Z_SAMPLES,
) -> SynthesisResult:
    """Search for the width profile that best meets ``spec``.

    Deterministic for a fixed ``options.rng_seed``. An infeasible outcome is
    returned, not raised; inspect ``result.report.failures()``.
    """
    opts = options or OptimizerOptions()
    grid = grid or _default_grid(spec, 120)
    common = dict(
        weights=opts.penalty_weights,
        z_samples=z_samples,
        slack_db=opts.slack_db,
        slack_width=opts.slack_width,
    )
    problem = FilterProblem(spec, substrate, grid, sections_per_lambda=sections_per_lambda, **common)
    search = problem
    if opts.search_sections_per_lambda < sections_per_lambda:
        search = FilterProblem(
            spec, substrate, grid, sections_per_lambda=opts.search_sections_per_lambda, **common
        )
    budget = _Budget(opts.max_evals)
    archive = _Archive()

    pool = ThreadPoolExecutor(opts.workers) if opts.workers > 1 else None
    try:
        reserve = min(opts.refine_evals, opts.max_evals - opts.population) if opts.local_refine else 0
        pop, evals, history = _differential_evolution(search, opts, budget, pool, reserve)
        if search is not problem:
            # rescore the final population at full resolution, best first
            order = np.argsort([e.value for e in evals], kind="stable")
            best_coarse = (pop[order[0]], evals[order[0]])
            order = order[: budget.left]
            evals = _evaluate_all(problem, pop[order], pool)
            budget.used += len(order)
            pop = pop[order]
            if not evals:
                archive.offer(*best_coarse)
        for x, ev in zip(pop, evals):
            archive.offer(x, ev)
    finally:
        if pool is not None:
            pool.shutdown()

    if opts.local_refine and budget.left > 0:
        _refine(problem, archive.choice()[0], opts, budget, archive)
        if archive.best[1].value < history[-1]:
            history.append(archive.best[1].value)

    x, ev = archive.choice()
    profile = problem.profile(x)
    report, err, sweep = verify(profile, spec, substrate, grid, problem.m, z_samples=z_samples)
    return SynthesisResult(
        profile=profile,
        error_value=err,
        report=report,
        evals_used=budget.used,
        feasible=report.passed,
        history=tuple(history),
        objective_value=ev.value,
        sweep=sweep,
    )
