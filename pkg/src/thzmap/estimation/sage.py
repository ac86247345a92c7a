"""Joint delay-angle SAGE estimation of multipath components.

Paths are extracted one at a time by successive interference cancellation
and then refined in EM cycles, each path re-estimated against the residual
with its own contribution added back. The residual is kept in the frequency
domain throughout.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
from pydantic import Field
from scipy.constants import c as SPEED_OF_LIGHT

from thzmap.channel.antenna import AntennaPattern, GaussianPattern, normalized_gain
from thzmap.channel.synthesis import ChannelResponse, path_signature
from thzmap.estimation.errors import EstimationError
from thzmap.estimation.preprocess import compute_padp, delay_domain_floor, estimate_noise_floor, to_cir
from thzmap.models.base import DomainModel
from thzmap.scene.geometry import wrap_to_pi
from thzmap.scene.models import FrequencyGrid, TrxConfig

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
SUPPORT_HPBW_FACTOR = 2.0
EM_THETA_STEPS = 4
REFINE_RESOLUTION = 64
MAX_CLIMB_STEPS = 64
TINY = 1e-300


class SageConfig(DomainModel):
    max_paths: int = Field(default=200, gt=0)
    max_em_iterations: int = Field(default=30, gt=0)
    tau_grid_oversampling: int = Field(default=8, gt=0)
    theta_grid_step: float = Field(default=0.25, gt=0.0)
    convergence_eps: float = Field(default=1e-4, gt=0.0)
    stop_margin_db: float = Field(default=6.0, gt=0.0)
    dynamic_range_db: float = Field(default=40.0, gt=0.0)
    # "local" starts from the residual's PADP peak; "full" scans every angle first
    theta_search: Literal["local", "full"] = "local"


@dataclass
class SageTrace:
    """Residual energy of one run, after each extraction and after each EM path update."""

    residual_energy: list[float] = field(default_factory=list)
    em_residual_energy: list[float] = field(default_factory=list)
    em_iterations: int = 0
    stop_reason: str = ""


class MpcEstimate(DomainModel):
    alpha: complex
    tau: float = Field(..., ge=0.0)
    theta: float = Field(..., ge=0.0, lt=TWO_PI)
    power_db: float

    @classmethod
    def of(cls, alpha: complex, tau: float, theta: float) -> "MpcEstimate":
        magnitude = abs(alpha)
        power_db = 20.0 * math.log10(magnitude) if magnitude > 0.0 else -math.inf
        return cls(alpha=complex(alpha), tau=float(tau), theta=float(theta) % TWO_PI, power_db=power_db)


class _Problem:
    """Signature model and search objectives for one response."""

    def __init__(self, response: ChannelResponse, trx: TrxConfig, pattern: AntennaPattern) -> None:
        self.frequencies = response.frequencies()
        self.scans = response.scan_angles_rad
        self.radius = trx.uca_radius
        self.pattern = pattern
        self.n_freq = response.n_freq
        self.period = response.grid.unambiguous_delay
        self.support_width = SUPPORT_HPBW_FACTOR * pattern.hpbw_rad

    def signature(self, tau: float, theta: float) -> np.ndarray:
        return path_signature(tau, theta, self.frequencies, self.scans, self.radius, self.pattern)

    def signature_energy(self, theta: float) -> float:
        gains = normalized_gain(self.pattern, theta - self.scans)
        return self.n_freq * float(np.sum(gains**2))

    def amplitude(self, residual: np.ndarray, tau: float, theta: float) -> tuple[complex, np.ndarray]:
        """Least-squares amplitude of the path in ``residual`` and its unit signature."""
        u = self.signature(tau, theta)
        return complex(np.vdot(u, residual) / self.signature_energy(theta)), u

    def full_objective(self, residual: np.ndarray, tau: float, theta: float) -> float:
        u = self.signature(tau, theta)
        return abs(np.vdot(u, residual)) ** 2 / self.signature_energy(theta)

    def project(self, residual: np.ndarray, theta: float) -> tuple[np.ndarray, float]:
        """Angle-matched sum over supporting scans; returns (Y[k], signature energy)."""
        delta = wrap_to_pi(theta - self.scans)
        support = np.abs(delta) <= self.support_width
        if not np.any(support):
            return np.zeros(self.n_freq, dtype=complex), 0.0
        gains = normalized_gain(self.pattern, delta[support])
        array_phase = np.exp(
            -1j * 4.0 * math.pi * np.outer(self.frequencies, self.radius * np.cos(delta[support])) / SPEED_OF_LIGHT
        )
        projected = (residual[:, support] * array_phase * gains[None, :]).sum(axis=1)
        return projected, self.n_freq * float(np.sum(gains**2))

    def tau_objective(self, projected: np.ndarray, energy: float, taus: np.ndarray) -> np.ndarray:
        if energy <= 0.0:
            return np.zeros(np.size(taus))
        steering = np.exp(1j * TWO_PI * np.outer(np.atleast_1d(taus), self.frequencies))
        return np.abs(steering @ projected) ** 2 / energy

    def theta_objective(self, residual: np.ndarray, tau: float) -> Callable[[float], float]:
        def objective(theta: float) -> float:
            projected, energy = self.project(residual, theta)
            return float(self.tau_objective(projected, energy, np.array([tau]))[0])

        return objective

    def tau_objective_at(self, residual: np.ndarray, theta: float) -> Callable[[float], float]:
        projected, energy = self.project(residual, theta)

        def objective(tau: float) -> float:
            return float(self.tau_objective(projected, energy, np.array([tau]))[0])

        return objective


def sage_estimate(
    h: ChannelResponse,
    trx: TrxConfig,
    cfg: SageConfig | None = None,
    pattern: AntennaPattern | None = None,
    noise_floor_db: float | None = None,
    trace: SageTrace | None = None,
) -> list[MpcEstimate]:
    """Decompose ``h`` into paths, strongest first.

    ``noise_floor_db`` is the per-sample floor; it is estimated from the
    response when omitted. Pass a ``trace`` to collect per-step diagnostics.
    """
    config = cfg or SageConfig()
    record = trace if trace is not None else SageTrace()
    if not np.all(np.isfinite(h.h)):
        raise EstimationError("response contains non-finite entries")
    if not np.any(h.h):
        return []
    if h.n_freq < 2:
        raise EstimationError("SAGE needs at least two frequency points")

    problem = _Problem(h, trx, pattern or GaussianPattern(trx))
    if noise_floor_db is None:
        noise_floor_db = estimate_noise_floor(compute_padp(to_cir(h)))
    bin_floor_db = delay_domain_floor(noise_floor_db, 1.0 / h.n_freq)

    residual = h.h.copy()
    paths = _successive_cancellation(problem, residual, trx, h.grid, config, bin_floor_db, record)
    if paths:
        paths = _em_cycles(problem, residual, h.grid, config, paths, record)

    estimates = [MpcEstimate.of(alpha, tau % problem.period, theta) for alpha, tau, theta in paths]
    estimates.sort(key=lambda estimate: estimate.power_db, reverse=True)
    return estimates


def reconstruct_response(
    estimates: Sequence[MpcEstimate],
    grid: FrequencyGrid,
    scan_angles_deg: Sequence[float] | np.ndarray,
    trx: TrxConfig,
    pattern: AntennaPattern | None = None,
) -> ChannelResponse:
    """Noiseless response re-synthesized from the estimated paths."""
    beam = pattern or GaussianPattern(trx)
    angles = np.asarray(scan_angles_deg, dtype=float)
    frequencies = grid.frequencies()
    scans = np.deg2rad(angles)
    h = np.zeros((grid.n_points, angles.size), dtype=np.complex128)
    for estimate in estimates:
        h += estimate.alpha * path_signature(estimate.tau, estimate.theta, frequencies, scans, trx.uca_radius, beam)
    return ChannelResponse(h=h, grid=grid, scan_angles_deg=angles)


def _successive_cancellation(
    problem: _Problem,
    residual: np.ndarray,
    trx: TrxConfig,
    grid: FrequencyGrid,
    config: SageConfig,
    bin_floor_db: float,
    trace: SageTrace,
) -> list[tuple[complex, float, float]]:
    oversampling = config.tau_grid_oversampling
    tau_step = grid.delay_bin / oversampling
    theta_step = math.radians(config.theta_grid_step)
    scan_step = math.radians(trx.scan_step_deg)
    theta_span = max(1, math.ceil(scan_step / theta_step))
    boresight_offset = 2.0 * trx.uca_radius / SPEED_OF_LIGHT

    paths: list[tuple[complex, float, float, float]] = []
    threshold_db = bin_floor_db + config.stop_margin_db
    stop_reason = "max_paths"
    trace.residual_energy.append(float(np.vdot(residual, residual).real))
    while len(paths) < config.max_paths:
        if config.theta_search == "full":
            start = _full_search(problem, residual, grid, theta_span * theta_step)
        else:
            start = _padp_peak(problem, residual, grid, boresight_offset)
        if start is None:
            stop_reason = "residual exhausted"
            break
        tau0, theta0 = start

        taus = tau0 + tau_step * np.arange(-oversampling, oversampling + 1)
        best = (-1.0, tau0, theta0)
        for theta in theta0 + theta_step * np.arange(-theta_span, theta_span + 1):
            projected, energy = problem.project(residual, theta)
            values = problem.tau_objective(projected, energy, taus)
            index = int(np.argmax(values))
            if values[index] > best[0]:
                best = (float(values[index]), float(taus[index]), float(theta))
        _, tau, theta = best
        tau, _ = _refine(problem.tau_objective_at(residual, theta), tau, tau_step)
        theta, _ = _refine(problem.theta_objective(residual, tau), theta, theta_step)

        alpha, u = problem.amplitude(residual, tau, theta)
        power_db = 20.0 * math.log10(abs(alpha)) if alpha != 0 else -math.inf
        if paths:
            threshold_db = max(bin_floor_db + config.stop_margin_db, paths[0][3] - config.dynamic_range_db)
        if power_db < threshold_db:
            stop_reason = f"candidate {power_db:.1f} dB below threshold {threshold_db:.1f} dB"
            break
        residual -= alpha * u
        paths.append((alpha, tau, theta, power_db))
        trace.residual_energy.append(float(np.vdot(residual, residual).real))
    trace.stop_reason = stop_reason
    logger.info("SIC extracted %d paths (%s)", len(paths), stop_reason)
    return [(alpha, tau, theta) for alpha, tau, theta, _ in paths]


def _em_cycles(
    problem: _Problem,
    residual: np.ndarray,
    grid: FrequencyGrid,
    config: SageConfig,
    paths: list[tuple[complex, float, float]],
    trace: SageTrace,
) -> list[tuple[complex, float, float]]:
    oversampling = config.tau_grid_oversampling
    tau_step = grid.delay_bin / oversampling
    theta_step = math.radians(config.theta_grid_step)
    tau_offsets = tau_step * np.arange(-oversampling, oversampling + 1)
    theta_offsets = theta_step * np.arange(-EM_THETA_STEPS, EM_THETA_STEPS + 1)

    previous = float(np.vdot(residual, residual).real)
    trace.em_residual_energy.append(previous)
    iterations = 0
    for iterations in range(1, config.max_em_iterations + 1):
        for index, (alpha, tau, theta) in enumerate(paths):
            target = residual + alpha * problem.signature(tau, theta)
            old_value = problem.full_objective(target, tau, theta)

            projected, energy = problem.project(target, theta)
            taus = tau + tau_offsets
            new_tau = float(taus[int(np.argmax(problem.tau_objective(projected, energy, taus)))])
            new_tau, _ = _refine(problem.tau_objective_at(target, theta), new_tau, tau_step)

            theta_objective = problem.theta_objective(target, new_tau)
            thetas = theta + theta_offsets
            new_theta = float(thetas[int(np.argmax([theta_objective(value) for value in thetas]))])
            new_theta, _ = _refine(theta_objective, new_theta, theta_step)

            if problem.full_objective(target, new_tau, new_theta) >= old_value:
                tau, theta = new_tau, new_theta
            alpha, u = problem.amplitude(target, tau, theta)
            residual[...] = target - alpha * u
            paths[index] = (alpha, tau, theta)
            trace.em_residual_energy.append(float(np.vdot(residual, residual).real))

        current = float(np.vdot(residual, residual).real)
        if previous == 0.0 or abs(previous - current) / previous < config.convergence_eps:
            break
        previous = current
    trace.em_iterations = iterations
    logger.info("EM refinement finished after %d iterations", iterations)
    return paths


def _padp_peak(
    problem: _Problem, residual: np.ndarray, grid: FrequencyGrid, boresight_offset: float
) -> tuple[float, float] | None:
    power = np.abs(np.fft.ifft(residual, axis=0)) ** 2
    peak_bin, peak_scan = divmod(int(np.argmax(power)), power.shape[1])
    if power[peak_bin, peak_scan] == 0.0:
        return None
    tau = (peak_bin * grid.delay_bin + boresight_offset) % problem.period
    return tau, float(problem.scans[peak_scan])


def _full_search(
    problem: _Problem, residual: np.ndarray, grid: FrequencyGrid, theta_step: float
) -> tuple[float, float] | None:
    """Best (τ, θ) over every supported angle on the delay-bin grid."""
    best: tuple[float, float, float] | None = None
    for theta in np.arange(0.0, TWO_PI, theta_step):
        projected, energy = problem.project(residual, float(theta))
        if energy <= 0.0:
            continue
        # the array phase is already compensated, so the delay profile is a plain IFFT
        values = np.abs(problem.n_freq * np.fft.ifft(projected)) ** 2 / energy
        index = int(np.argmax(values))
        if best is None or values[index] > best[0]:
            best = (float(values[index]), index * grid.delay_bin, float(theta))
    if best is None or best[0] == 0.0:
        return None
    return best[1], best[2]


def _refine(objective: Callable[[float], float], x: float, step: float) -> tuple[float, float]:
    """Hill-climb with step halving; bracketed maxima get a log-parabolic vertex step."""
    min_step = step / REFINE_RESOLUTION
    value = objective(x)
    moves = 0
    while step >= min_step:
        lower, upper = objective(x - step), objective(x + step)
        if moves < MAX_CLIMB_STEPS and max(lower, upper) > value:
            if upper >= lower:
                x, value = x + step, upper
            else:
                x, value = x - step, lower
            moves += 1
            continue
        offset = _parabolic_vertex(*(math.log(max(sample, TINY)) for sample in (lower, value, upper)))
        if offset != 0.0:
            candidate = objective(x + offset * step)
            if candidate > value:
                x, value = x + offset * step, candidate
        step /= 2.0
    return x, value


def _parabolic_vertex(left: float, centre: float, right: float) -> float:
    curvature = left - 2.0 * centre + right
    if curvature >= 0.0:
        return 0.0
    return float(np.clip(0.5 * (left - right) / curvature, -1.0, 1.0))
