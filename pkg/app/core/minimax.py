"""Least-favourable densities and minimax characteristics for uncertainty classes"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from core.ascent import ProjectedGradientAscent
from core.class_sampler import sample_members
from core.closed_forms import anchored_coefficients, dw_cutoff, gamma_mask
from core.interpolator import Interpolator
from core.projections import make_projection
from core.spectral import factorize_inverse
from models.coefficients import FourierCoeffs
from models.density import InversePolynomial, Tabulated, complex_to_dict
from models.enums import ClassKind, Mechanism, PatternKind
from models.errors import (ClosedFormInvalid, FactorizationInaccurate, InvalidParameters, MaskViolation,
                           NewtonNotConverged, NotConverged, NotCovered, NotPositive, NotPositiveDefinite,
                           PositivityLost, WeightsNotPositive)
from models.grid import DEFAULT_GRID, fourier_coefficients, frequency_grid, trig_polynomial
from models.pattern import FunctionalWeights, ObservationPattern
from models.uncertainty import (D0Minus, DensityClass, DVU, DW, LeastFavourableResult, SaddleReport,
                                Validity, POSITIVITY_TOL)

logger = logging.getLogger(__name__)

OPTIMIZER_GRID = 512
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100
SADDLE_UPPER_TOL = 1e-8
SADDLE_LOWER_TOL = 1e-10
TIE_TOL = 1e-9


def _is_positive(values: np.ndarray) -> bool:
    peak = float(np.max(np.abs(values)))
    return peak > 0 and float(values.min()) > POSITIVITY_TOL * peak


def _check_outer_factor(b0: FourierCoeffs, mask, diagnostics: dict) -> bool:
    """Factorizes 1/f0 under the zero mask and records gamma (or the failure) in ``diagnostics``"""
    diagnostics["gamma_mask"] = sorted(int(n) for n in mask)
    try:
        factor = factorize_inverse(b0, mask)
    except (MaskViolation, NotPositive, FactorizationInaccurate) as exc:
        logger.warning("Outer factor check failed: %s", exc.message)
        diagnostics["factorization_error"] = exc.to_dict()["error"]
        return False
    diagnostics["factorization"] = factor.to_dict()
    return True


# ---------------------------------------------------------------------------
# D0-
# ---------------------------------------------------------------------------

def lf_d0minus(pattern: ObservationPattern, weights: FunctionalWeights, cls: D0Minus,
               grid: int = DEFAULT_GRID, strict: bool = False) -> LeastFavourableResult:
    """Anchored candidate b0(t - t*) = p a(t)/a(t*) and h0 = A - alpha e^{i t* lambda} / f0"""
    b0 = anchored_coefficients(pattern, weights, cls.p)
    anchor = pattern.anchor
    a_star = weights.value(anchor).real
    alpha = a_star / cls.p

    inverse = b0.trig_values(grid)
    positivity_ok = _is_positive(inverse)
    lam = frequency_grid(grid)
    indices = pattern.missing_indices()
    big_a = trig_polynomial(indices, weights.weight_vector(pattern), grid)
    h0_grid = big_a - alpha * np.exp(1j * anchor * lam) * inverse
    closed_delta = a_star ** 2 / cls.p
    diagnostics = {"min_inverse": float(inverse.min()), "closed_form_delta": closed_delta}

    if positivity_ok:
        f0 = InversePolynomial(b0)
        delta0 = Interpolator(grid).solve(pattern, weights, f0).delta
        mask = gamma_mask(pattern, b0.effective_half_length())
        factorization_ok = _check_outer_factor(b0, mask, diagnostics)
    else:
        logger.warning("Anchored 1/f0 is not positive (min %.3e); closed form invalid", inverse.min())
        f0 = None
        delta0 = closed_delta
        factorization_ok = False

    result = LeastFavourableResult(
        class_kind=cls.kind,
        mechanism=Mechanism.CLOSED_FORM,
        f0=f0,
        b0=b0,
        h0_grid=h0_grid,
        delta0=delta0,
        validity=Validity(positivity_ok, positivity_ok, factorization_ok),
        grid=grid,
        lagrange={"alpha": complex_to_dict(alpha), "anchor": int(anchor)},
        diagnostics=diagnostics,
    )
    if strict and not positivity_ok:
        raise ClosedFormInvalid("Anchored 1/f0 is not positive on the grid", result=result.to_dict())
    return result


# ---------------------------------------------------------------------------
# D_W
# ---------------------------------------------------------------------------

class MultiplierSystem:
    """B(b) p = a with b fixed at |lag| <= W and unknown above, p supported on the cutoff"""

    def __init__(self, pattern: ObservationPattern, weights: FunctionalWeights, cls: DW, cutoff: int):
        self.indices = pattern.missing_indices()
        self.a = weights.weight_vector(pattern)
        self.b_given = np.asarray(cls.b)
        self.W = cls.W
        self.support = np.arange(cutoff + 1)
        self.lags = self.indices[:, None] - self.indices[self.support][None, :]
        magnitudes = np.abs(self.lags)
        self.unknown = np.array(sorted(set(magnitudes[magnitudes > self.W].tolist())), dtype=int)
        self.position = {int(n): k for k, n in enumerate(self.unknown)}
        self.known_mask = magnitudes <= self.W
        self.unknown_index = np.vectorize(lambda m: self.position.get(int(m), -1))(magnitudes)
        self.sign = np.sign(self.lags)

    @property
    def n_support(self) -> int:
        return int(self.support.size)

    @property
    def n_unknown(self) -> int:
        return int(self.unknown.size)

    def unpack(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        s, k = self.n_support, self.n_unknown
        p = x[:s] + 1j * x[s:2 * s]
        b = x[2 * s:2 * s + k] + 1j * x[2 * s + k:]
        return p, b

    def pack(self, p: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.concatenate([p.real, p.imag, b.real, b.imag])

    def matrix(self, b_unknown: np.ndarray) -> np.ndarray:
        values = np.zeros(self.lags.shape, dtype=complex)
        values[self.known_mask] = self.b_given[np.abs(self.lags[self.known_mask])]
        rest = ~self.known_mask
        picked = b_unknown[self.unknown_index[rest]]
        values[rest] = np.where(self.lags[rest] > 0, picked, np.conj(picked))
        return values

    def residual(self, x: np.ndarray) -> np.ndarray:
        p, b = self.unpack(x)
        return self.matrix(b) @ p - self.a

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        p, b = self.unpack(x)
        n = self.indices.size
        matrix = self.matrix(b)
        d_b_re = np.zeros((n, self.n_unknown), dtype=complex)
        d_b_im = np.zeros((n, self.n_unknown), dtype=complex)
        rows, cols = np.nonzero(~self.known_mask)
        for u, v in zip(rows, cols):
            k = self.unknown_index[u, v]
            d_b_re[u, k] += p[v]
            d_b_im[u, k] += 1j * p[v] * self.sign[u, v]
        return np.hstack([matrix, 1j * matrix, d_b_re, d_b_im])

    def initial_point(self) -> np.ndarray:
        lead = self.matrix(np.zeros(self.n_unknown, dtype=complex))[self.support]
        p = linalg.solve(lead, self.a[self.support])
        return self.pack(p, np.zeros(self.n_unknown, dtype=complex))

    def coefficients(self, b_unknown: np.ndarray) -> FourierCoeffs:
        coeffs = {n: complex(self.b_given[n]) for n in range(self.W + 1)}
        for n, value in zip(self.unknown, b_unknown):
            coeffs[int(n)] = complex(value)
        return FourierCoeffs.from_mapping(coeffs).hermitian()


def _stack(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag], axis=0)


def solve_multipliers(system: MultiplierSystem, max_iter: int = NEWTON_MAX_ITER) -> Tuple[np.ndarray, float, int]:
    """Damped Gauss-Newton with minimum-norm steps; returns (x, residual, iterations)"""
    x = system.initial_point()
    residual = system.residual(x)
    norm = float(np.max(np.abs(residual)))
    iterations = 0
    while norm >= NEWTON_TOL and iterations < max_iter:
        jac = _stack(system.jacobian(x))
        step = np.linalg.lstsq(jac, -_stack(residual), rcond=None)[0]
        t = 1.0
        while True:
            trial = x + t * step
            trial_residual = system.residual(trial)
            trial_norm = float(np.max(np.abs(trial_residual)))
            if trial_norm < norm or t < 1e-8:
                break
            t *= 0.5
        x, residual, norm = trial, trial_residual, trial_norm
        iterations += 1
        logger.debug("Gauss-Newton iteration %d residual %.3e step %.3g", iterations, norm, t)
    if norm >= NEWTON_TOL:
        raise NewtonNotConverged(f"Multiplier system residual {norm:.3e} after {iterations} iterations",
                                 residual=norm, iterations=iterations)
    return x, norm, iterations


def lf_dW(pattern: ObservationPattern, weights: FunctionalWeights, cls: DW,
          grid: int = DEFAULT_GRID) -> LeastFavourableResult:
    """Least-favourable density for fixed coefficients b(0..W) of 1/f.

    When W covers every Gram lag, Delta is the same for the whole class and
    the AR(W) density is returned. Otherwise the multipliers p on the first
    W_k+1 canonical positions and the unknown coefficients b(n), n > W, solve
    B(b) p = a by damped Gauss-Newton.
    """
    W = cls.W
    interpolator = Interpolator(grid)

    if pattern.kind == PatternKind.S3:
        raise NotCovered("D_W has no cutoff rule for S3")
    if W >= pattern.max_lag and not pattern.kind.is_infinite:
        logger.info("D_W degenerate: W=%d covers every Gram lag (%d)", W, pattern.max_lag)
        b0 = cls.coefficients()
        f0 = InversePolynomial(b0)
        solution = interpolator.solve(pattern, weights, f0)
        # the AR(W) factor carries no forced zeros
        diagnostics = {"degenerate": True, "max_lag": pattern.max_lag}
        factorization_ok = _check_outer_factor(b0, (), diagnostics)
        return LeastFavourableResult(
            class_kind=ClassKind.DW,
            mechanism=Mechanism.DEGENERATE,
            f0=f0,
            b0=b0,
            h0_grid=solution.h_grid,
            delta0=solution.delta,
            validity=Validity(True, True, factorization_ok),
            grid=solution.grid,
            lagrange={"p": [{"index": int(j), **complex_to_dict(v)} for j, v in zip(solution.indices, solution.c)]},
            diagnostics=diagnostics,
        )

    cutoff = dw_cutoff(pattern, W)
    system = MultiplierSystem(pattern, weights, cls, cutoff)
    x, residual, iterations = solve_multipliers(system)
    p, b_unknown = system.unpack(x)
    b0 = system.coefficients(b_unknown)

    inverse = b0.trig_values(grid)
    if not _is_positive(inverse):
        raise PositivityLost(f"1/f0 from the multiplier system has minimum {inverse.min():.3e}",
                             minimum=float(inverse.min()))
    f0 = InversePolynomial(b0)
    solution = interpolator.solve(pattern, weights, f0)

    expected = np.zeros(system.indices.size, dtype=complex)
    expected[system.support] = p
    mismatch = float(np.max(np.abs(solution.c - expected)))
    if mismatch > 1e-8 * max(1.0, float(np.max(np.abs(p)))):
        logger.warning("Solved multipliers differ from Gram solution by %.3e", mismatch)

    diagnostics = {
        "residual": residual,
        "iterations": iterations,
        "cutoff": cutoff,
        "unknown_lags": system.unknown.tolist(),
        "multiplier_mismatch": mismatch,
    }
    mask = gamma_mask(pattern, b0.effective_half_length(), W=W)
    factorization_ok = _check_outer_factor(b0, mask, diagnostics)

    return LeastFavourableResult(
        class_kind=ClassKind.DW,
        mechanism=Mechanism.NEWTON,
        f0=f0,
        b0=b0,
        h0_grid=solution.h_grid,
        delta0=solution.delta,
        validity=Validity(True, True, factorization_ok),
        grid=solution.grid,
        lagrange={"p": [{"index": int(system.indices[k]), **complex_to_dict(v)} for k, v in zip(system.support, p)]},
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# D_v^u
# ---------------------------------------------------------------------------

def lf_dvu(pattern: ObservationPattern, weights: FunctionalWeights, cls: DVU, grid: int = DEFAULT_GRID,
           optimizer_grid: int = OPTIMIZER_GRID, seed: int = 0, **options) -> LeastFavourableResult:
    """Anchored candidate when it respects the bounds, numerical maximiser otherwise"""
    try:
        candidate = lf_d0minus(pattern, weights, D0Minus(cls.p), grid)
    except (WeightsNotPositive, InvalidParameters) as exc:
        logger.info("No closed-form candidate (%s); using the numerical maximiser", exc.message)
        candidate = None

    if candidate is not None and candidate.validity.positivity_ok:
        bounds_ok = cls.contains(candidate.f0.values(grid))
        if bounds_ok:
            candidate.class_kind = ClassKind.DVU
            candidate.validity.bounds_ok = True
            candidate.lagrange.update(lower_active=[], upper_active=[])
            return candidate
        logger.info("Anchored candidate leaves the band [v, u]; using the numerical maximiser")

    result = numerical_lf(pattern, weights, cls, grid=optimizer_grid, seed=seed, **options)
    result.diagnostics["closed_form_rejected"] = True
    return result


# ---------------------------------------------------------------------------
# Numerical maximiser
# ---------------------------------------------------------------------------

class DeltaObjective:
    """Delta(g) = <B(g)^{-1} a, a> on a grid, with gradient -|C(lambda)|^2"""

    def __init__(self, pattern: ObservationPattern, weights: FunctionalWeights, grid: int):
        self.indices = pattern.missing_indices()
        self.a = weights.weight_vector(pattern)
        self.grid = grid
        self.max_lag = pattern.max_lag
        self.lags = self.indices[:, None] - self.indices[None, :]

    def __call__(self, g: np.ndarray) -> Tuple[float, np.ndarray]:
        coeffs = fourier_coefficients(g.astype(complex), np.arange(-self.max_lag, self.max_lag + 1))
        coeffs = 0.5 * (coeffs + np.conj(coeffs[::-1]))
        matrix = coeffs[self.lags + self.max_lag]
        try:
            factor = linalg.cho_factor(matrix, lower=True)
        except linalg.LinAlgError:
            return -np.inf, np.zeros_like(g)
        c = linalg.cho_solve(factor, self.a)
        delta = float(np.vdot(self.a, c).real)
        big_c = trig_polynomial(self.indices, c, self.grid)
        return delta, -np.abs(big_c) ** 2


def _starts(pattern, weights, cls: DensityClass, projection, grid: int, starts: int, rng) -> list:
    points = [projection.start()]
    if isinstance(cls, (D0Minus, DVU)) and pattern.anchor is not None:
        try:
            p = cls.p
            candidate = anchored_coefficients(pattern, weights, p).trig_values(grid)
            if _is_positive(candidate):
                points.append(candidate)
        except (WeightsNotPositive, InvalidParameters):
            pass
    for member in sample_members(cls, max(starts - len(points), 0), rng, grid):
        points.append(member.inverse_values(grid))
    return points


def _lagrange_sets(cls: DensityClass, g: np.ndarray, projection) -> dict:
    if isinstance(cls, DVU):
        tol = 1e-9
        return {
            "lower_active": np.nonzero(g >= projection.hi * (1 - tol))[0].tolist(),
            "upper_active": np.nonzero(g <= projection.lo * (1 + tol))[0].tolist(),
        }
    floor_active = np.nonzero(g <= projection.floor * (1 + 1e-9))[0].tolist()
    return {"floor_active": floor_active}


def _best_run(runs) -> int:
    """Index of the highest run; a converged run within rounding of it takes precedence"""
    top = max(range(len(runs)), key=lambda k: runs[k].objective)
    if runs[top].converged:
        return top
    level = runs[top].objective
    for k, run in enumerate(runs):
        if run.converged and run.objective >= level - TIE_TOL * max(1.0, abs(level)):
            return k
    return top


def numerical_lf(pattern: ObservationPattern, weights: FunctionalWeights, cls: DensityClass,
                 grid: int = OPTIMIZER_GRID, seed: int = 0, starts: int = 4, max_iter: int = 10000,
                 tol: float = 1e-7, positivity_floor: float = 1e-3) -> LeastFavourableResult:
    """Multi-start projected-gradient maximisation of Delta over the class on a grid"""
    if pattern.max_lag > grid // 4:
        raise InvalidParameters(f"Optimizer grid {grid} too small for Gram lag {pattern.max_lag}")
    projection = make_projection(cls, grid, positivity_floor)
    objective = DeltaObjective(pattern, weights, grid)
    engine = ProjectedGradientAscent(projection, max_iter, tol)
    rng = np.random.default_rng(seed)

    runs = [engine.run(objective, start) for start in _starts(pattern, weights, cls, projection, grid, starts, rng)]
    degenerate = all(r.degenerate for r in runs)
    best_index = _best_run(runs) if not degenerate else 0
    best = runs[best_index]
    diagnostics = {
        "starts": len(runs),
        "best_start": best_index,
        "iterations": [r.iterations for r in runs],
        "vertex_steps": [r.vertex_steps for r in runs],
        "stationarity": best.stationarity,
        "stalled": best.stalled,
        "degenerate": degenerate,
        "objective": best.objective,
        "positivity_floor": positivity_floor,
    }
    if not best.converged:
        raise NotConverged(f"Projected gradient stopped at stationarity {best.stationarity:.3e} "
                           f"after {best.iterations} iterations", **diagnostics)

    g = best.values
    f0 = Tabulated(1.0 / g)
    solution = Interpolator(grid, half_length=0).solve(pattern, weights, f0)
    lags = np.arange(-(grid // 4), grid // 4 + 1)
    b0 = FourierCoeffs(fourier_coefficients(g.astype(complex), lags)).hermitian()
    bounds_ok = cls.contains(f0.values(grid)) if isinstance(cls, DVU) else None
    mechanism = Mechanism.DEGENERATE if diagnostics["degenerate"] else Mechanism.NUMERICAL
    logger.info("Numerical maximiser: delta=%.12g from start %d (%s)", solution.delta, best_index, mechanism.value)

    return LeastFavourableResult(
        class_kind=cls.kind,
        mechanism=mechanism,
        f0=f0,
        b0=b0,
        h0_grid=solution.h_grid,
        delta0=solution.delta,
        validity=Validity(False, True, False, bounds_ok),
        grid=grid,
        lagrange=_lagrange_sets(cls, g, projection),
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Saddle-point check
# ---------------------------------------------------------------------------

def _perturbation(pattern: ObservationPattern, rng: np.random.Generator, epsilon: float, grid: int) -> np.ndarray:
    indices = pattern.missing_indices()
    pool = pattern.observed_between(int(indices.min()) - 10, int(indices.max()) + 10)
    chosen = rng.choice(pool, size=min(3, pool.size), replace=False)
    coeffs = epsilon * (rng.normal(size=chosen.size) + 1j * rng.normal(size=chosen.size))
    return trig_polynomial(chosen, coeffs, grid)


def saddle_check(result: LeastFavourableResult, pattern: ObservationPattern, weights: FunctionalWeights,
                 cls: DensityClass, n_samples: int = 100, seed: int = 0, epsilon: float = 1e-3,
                 h0_grid: Optional[np.ndarray] = None) -> SaddleReport:
    """Count how often Delta(h0; f) <= Delta0 over class samples and Delta(h0 + dh; f0) >= Delta0"""
    if result.f0 is None:
        raise ClosedFormInvalid("No valid least-favourable density to check")
    grid = result.grid
    h0 = result.h0_grid if h0_grid is None else h0_grid
    interpolator = Interpolator(grid)
    rng = np.random.default_rng(seed)
    report = SaddleReport(n_samples=n_samples)
    scale = max(1.0, abs(result.delta0))

    for f in sample_members(cls, n_samples, rng, grid):
        try:
            excess = interpolator.mse_of_characteristic(h0, pattern, weights, f, grid) - result.delta0
        except NotPositiveDefinite:
            continue
        report.max_excess = max(report.max_excess, excess)
        if excess <= SADDLE_UPPER_TOL * scale:
            report.worst_case_pass += 1
        else:
            report.worst_case_fail += 1

    for _ in range(n_samples):
        perturbed = h0 + _perturbation(pattern, rng, epsilon, grid)
        deficit = result.delta0 - interpolator.mse_of_characteristic(perturbed, pattern, weights, result.f0, grid)
        report.max_deficit = max(report.max_deficit, deficit)
        if deficit <= SADDLE_LOWER_TOL * scale:
            report.optimality_pass += 1
        else:
            report.optimality_fail += 1

    logger.info("Saddle check: worst-case %d/%d, optimality %d/%d", report.worst_case_pass, n_samples,
                report.optimality_pass, n_samples)
    return report
