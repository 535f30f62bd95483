import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.interpolator import Interpolator
from core.closed_forms import covers_dw
from core.minimax import lf_d0minus, lf_dvu, lf_dW, numerical_lf, saddle_check
from core.oracle import build_problem, estimate_weights, project
from core.simulation import simulate, squared_errors, summarize
from core.spectral import check_positive, minimality_value
from models.enums import Command
from models.errors import ClosedFormInvalid, InterpolationError, InvalidParameters, VerificationFailed
from models.grid import frequency_grid
from models.solution import ConvergenceReport, InterpolationSolution
from models.uncertainty import D0Minus, DVU, DW
from services.config_loader import ConfigLoader, ExperimentConfig

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-6
TRUNCATED_ORACLE_TOL = 1e-5
VANISHING_TOL = 1e-8
FORMULA_TOL = 1e-8
MONOTONE_TOL = 1e-10
SIMULATION_CHUNK = 10000
EXPORTED_PATHS = 10

Table = Tuple[List[str], List[tuple]]


@dataclass
class RunResult:
    """Result record, exit status and the CSV tables a command produced"""
    record: Dict[str, Any]
    exit_status: int = 0
    tables: Dict[str, Table] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return "error" in self.record


class ExperimentRunner:
    """Runs one command against a loaded experiment config"""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.options = config.options
        self.interpolator = Interpolator(self.options.grid, self.options.half_length)

    def run(self, command: Command) -> RunResult:
        handlers = {
            Command.MINIMALITY: self.minimality,
            Command.INTERPOLATE: self.interpolate,
            Command.LEAST_FAVOURABLE: self.least_favourable,
            Command.VERIFY: self.verify,
            Command.SIMULATE: self.simulate,
        }
        if self.config.density is not None:
            check_positive(self.config.density, self.options.grid)
        result = handlers[command]()
        result.record = {"command": command.value, "options": self.options.to_dict(), **result.record}
        return result

    def _solve(self) -> Tuple[InterpolationSolution, Optional[ConvergenceReport]]:
        pattern, weights = self.config.pattern, self.config.weights
        f = self.config.require_density()
        if pattern.kind.is_infinite:
            return self.interpolator.solve_truncated(pattern, weights, f, self.options.truncation)
        return self.interpolator.solve(pattern, weights, f), None

    def minimality(self) -> RunResult:
        f = self.config.require_density()
        grid = self.options.grid
        value = minimality_value(f, grid)
        values = f.values(grid)
        inverse = f.inverse_values(grid)
        rows = [(float(x), float(v), float(g)) for x, v, g in zip(frequency_grid(grid), values, inverse)]
        return RunResult(
            record={"value": value, "minimal": bool(np.isfinite(value) and value > 0)},
            tables={"density": (["lambda", "f", "inv_f"], rows)},
        )

    def interpolate(self) -> RunResult:
        solution, report = self._solve()
        record = solution.to_dict()
        if report is not None:
            record["convergence"] = report.to_dict()
        logger.info("Delta = %.17g for %s", solution.delta, solution.pattern.kind.value)
        return RunResult(record=record, tables={"characteristic": (["lambda", "re_h", "im_h"], solution.grid_rows())})

    def least_favourable(self) -> RunResult:
        pattern, weights = self.config.pattern, self.config.weights
        cls = self.config.require_class()
        options = self.options

        optimizer = {"seed": options.seed, "starts": options.starts, "max_iter": options.max_iter,
                     "positivity_floor": options.positivity_floor}

        if isinstance(cls, D0Minus) and pattern.anchor is not None and weights.is_positive(pattern):
            result = lf_d0minus(pattern, weights, cls, options.grid)
        elif isinstance(cls, DW) and not pattern.kind.is_infinite and covers_dw(pattern):
            result = lf_dW(pattern, weights, cls, options.grid)
        elif isinstance(cls, DVU):
            result = lf_dvu(pattern, weights, cls, options.grid, optimizer_grid=options.optimizer_grid, **optimizer)
        elif isinstance(cls, (D0Minus, DW)):
            logger.info("No closed form for %s on %s; using the numerical maximiser", cls.kind.value,
                        pattern.kind.value)
            result = numerical_lf(pattern, weights, cls, grid=options.optimizer_grid, **optimizer)
        else:
            raise InvalidParameters(f"Unsupported class {cls.kind.value}")

        tables = {"least_favourable": (["lambda", "f0", "re_h0", "im_h0"], result.grid_rows())}
        if result.f0 is None:
            error = ClosedFormInvalid("Closed-form least-favourable density is not positive")
            return RunResult(record={"result": result.to_dict(), **error.to_dict()},
                             exit_status=error.exit_status, tables=tables)

        report = saddle_check(result, pattern, weights, cls, n_samples=options.samples, seed=options.seed)
        return RunResult(record={"result": result.to_dict(), "saddle": report.to_dict()}, tables=tables)

    def verify(self) -> RunResult:
        solution, report = self._solve()
        f = self.config.require_density()
        pattern = solution.pattern
        weights = self.config.weights
        scale = max(1.0, abs(solution.delta))
        checks = []

        previous = None
        mse = None
        for window in self.options.windows:
            mse = project(build_problem(pattern, weights, f, window)).mse
            monotone = previous is None or mse <= previous + MONOTONE_TOL * scale
            checks.append(_check(f"oracle_window_{window}", monotone, mse))
            previous = mse

        tolerance = ORACLE_TOL if report is None else TRUNCATED_ORACLE_TOL
        gap = abs(mse - solution.delta) / scale
        checks.append(_check("oracle_equivalence", gap <= tolerance, gap, tolerance))

        norm = float(np.linalg.norm(solution.a))
        vanishing = max(abs(solution.characteristic_coefficient(int(j))) for j in solution.indices)
        checks.append(_check("vanishing_coefficients", vanishing <= VANISHING_TOL * norm, vanishing,
                             VANISHING_TOL * norm))

        direct = self.interpolator.mse_of_characteristic(solution.h_grid, pattern, weights, f, solution.grid)
        formula_gap = abs(direct - solution.delta) / scale
        checks.append(_check("two_formula_agreement", formula_gap <= FORMULA_TOL, formula_gap, FORMULA_TOL))

        record = {"delta": solution.delta, "checks": checks}
        failed = [c["name"] for c in checks if not c["passed"]]
        if failed:
            error = VerificationFailed(f"Checks failed: {', '.join(failed)}", failed=failed)
            record.update(error.to_dict())
            return RunResult(record=record, exit_status=error.exit_status)
        return RunResult(record=record)

    def simulate(self) -> RunResult:
        solution, _ = self._solve()
        f = self.config.require_density()
        if np.max(np.abs(solution.a.imag)) > 0:
            raise InvalidParameters("Monte-Carlo simulation needs real weights")

        window = self.options.window
        estimate = estimate_weights(solution, window)
        target = {int(j): complex(a) for j, a in zip(solution.indices, solution.a)}
        origin = int(solution.indices.min()) - window
        length = int(solution.indices.max()) + window - origin + 1

        errors = []
        first_paths = None
        for first in range(0, self.options.replicates, SIMULATION_CHUNK):
            count = min(SIMULATION_CHUNK, self.options.replicates - first)
            paths = simulate(f, length, count, self.options.seed, first_replicate=first)
            if first_paths is None:
                first_paths = paths[:EXPORTED_PATHS]
            errors.append(squared_errors(paths, origin, estimate.as_dict(), target))
            logger.debug("Simulated replicates %d..%d", first, first + count - 1)

        mean, stderr = summarize(np.concatenate(errors))
        z_score = (mean - solution.delta) / stderr if stderr > 0 else float("nan")
        logger.info("Empirical MSE %.6f vs delta %.6f (z = %.2f)", mean, solution.delta, z_score)

        header = ["t"] + [f"replicate_{r}" for r in range(first_paths.shape[0])]
        rows = [(origin + c, *map(float, first_paths[:, c])) for c in range(length)]
        return RunResult(
            record={
                "delta": solution.delta,
                "empirical_mse": mean,
                "stderr": stderr,
                "z_score": z_score,
                "replicates": self.options.replicates,
                "window": window,
                "observations": int(estimate.observed.size),
            },
            tables={"paths": (header, rows)},
        )


def _check(name: str, passed: bool, value: float, tolerance: Optional[float] = None) -> Dict[str, Any]:
    check = {"name": name, "passed": bool(passed), "value": float(value)}
    if tolerance is not None:
        check["tolerance"] = float(tolerance)
    return check


def run_experiment(command: Union[Command, str], source: Union[dict, str, Path],
                   grid: Optional[int] = None, truncation: Optional[Sequence[int]] = None,
                   seed: Optional[int] = None) -> RunResult:
    """
    Load a config and run one command on it.

    Args:
        command: one of the Command values
        source: config dictionary or path to a JSON config file
        grid, truncation, seed: command-line overrides of the options block

    Returns:
        RunResult whose record carries either the result or an error entry
    """
    try:
        command = Command(command)
        loader = ConfigLoader()
        config = loader.load_config(source) if isinstance(source, dict) else loader.load_file(source)
        options = config.options.override(grid=grid, truncation=truncation, seed=seed)
        return ExperimentRunner(replace(config, options=options)).run(command)
    except InterpolationError as e:
        logger.error("%s: %s", e.code, e.message)
        return RunResult(record=e.to_dict(), exit_status=e.exit_status)
    except ValueError as e:
        return RunResult(record={"error": {"code": "INVALID_PARAMETERS", "message": str(e)}}, exit_status=1)
    except Exception as e:
        logger.exception("Unexpected failure")
        return RunResult(
            record={"error": {"code": "SERVER_ERROR", "message": f"An unexpected error occurred: {str(e)}"}},
            exit_status=2,
        )
