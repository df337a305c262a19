"""Monte Carlo benchmark of the localizers under TOA noise.

A world is defined by a velocity profile c(d); exact arrival times
t_i = d_i / c(d_i) get independent zero-mean Gaussian perturbations, the
perturbed TDOA vector feeds every estimator, and position errors are
reduced to RMSE(sigma_t) = sqrt(mean ||p_s - p_hat||^2) over the runs.

Reproducibility: each run draws its noise from a counter-based Philox
generator keyed by (seed, run_index), so runs can execute in any order
(or in parallel) without changing the report.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveDistanceError, SourceOnSensorError
from .localize import Algorithm, make_grid, range_difference_matrix
from .regions import (
    RegionMap,
    SensorArray,
    characteristic_matrix,
    enumerate_regions,
    pair_index_arrays,
    sign_with_tie,
)
from .synth import RoomGeometry

RNG_ALGORITHM = "philox4x64(key=[seed,run_index])"


class ProfileKind(enum.Enum):
    CONSTANT = "constant"
    POWER_LAW = "power_law"
    CLAMPED_DECAY = "clamped_decay"


@dataclass(frozen=True)
class VelocityProfile:
    """Perceived propagation velocity as a function of distance.

    CONSTANT       c(d) = c0
    POWER_LAW      c(d) = (16 a^2 / (theta d))^(1/3), the damped-plate law
    CLAMPED_DECAY  c(d) = c_far + (c_near - c_far) / (1 + (d/d_knee)^2)
    """

    kind: ProfileKind
    c0: float | None = None
    dispersion_coeff: float | None = None
    damping_theta: float | None = None
    c_near: float | None = None
    c_far: float | None = None
    d_knee: float | None = None

    def __post_init__(self):
        if self.kind is ProfileKind.CONSTANT:
            if self.c0 is None or self.c0 <= 0:
                raise ValueError("CONSTANT profile needs c0 > 0")
        elif self.kind is ProfileKind.POWER_LAW:
            if (self.dispersion_coeff is None or self.dispersion_coeff <= 0
                    or self.damping_theta is None or self.damping_theta <= 0):
                raise ValueError(
                    "POWER_LAW profile needs dispersion_coeff > 0 and "
                    "damping_theta > 0")
        else:
            ok = (self.c_near is not None and self.c_far is not None
                  and self.d_knee is not None
                  and self.c_near >= self.c_far > 0 and self.d_knee > 0)
            if not ok:
                raise ValueError(
                    "CLAMPED_DECAY profile needs c_near >= c_far > 0 and "
                    "d_knee > 0")

    @classmethod
    def constant(cls, c0: float) -> "VelocityProfile":
        return cls(kind=ProfileKind.CONSTANT, c0=c0)

    @classmethod
    def power_law(cls, dispersion_coeff: float,
                  damping_theta: float) -> "VelocityProfile":
        return cls(kind=ProfileKind.POWER_LAW,
                   dispersion_coeff=dispersion_coeff,
                   damping_theta=damping_theta)

    @classmethod
    def clamped_decay(cls, c_near: float = 2000.0, c_far: float = 500.0,
                      d_knee: float = 3.0) -> "VelocityProfile":
        return cls(kind=ProfileKind.CLAMPED_DECAY, c_near=c_near, c_far=c_far,
                   d_knee=d_knee)


def profile_speed(profile: VelocityProfile, d):
    """Propagation speed of the profile at distance d (m/s)."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise NonPositiveDistanceError("profile requires d > 0")
    if profile.kind is ProfileKind.CONSTANT:
        out = np.full_like(d, profile.c0)
    elif profile.kind is ProfileKind.POWER_LAW:
        a = profile.dispersion_coeff
        out = (16.0 * a**2 / (profile.damping_theta * d))**(1.0 / 3.0)
    else:
        out = profile.c_far + (profile.c_near - profile.c_far) / (
            1.0 + (d / profile.d_knee)**2)
    return float(out) if out.ndim == 0 else out


def simulate_toas(source, sensors: SensorArray,
                  profile: VelocityProfile) -> np.ndarray:
    """Exact arrival times t_i = d_i / c(d_i) from the source to each sensor."""
    source = np.asarray(source, dtype=float)
    dists = np.linalg.norm(sensors.positions - source[None, :], axis=1)
    if np.any(dists == 0):
        raise SourceOnSensorError(f"source {tuple(source)} sits on a sensor")
    return dists / profile_speed(profile, dists)


def add_toa_noise(toas, sigma_t: float, rng: np.random.Generator) -> np.ndarray:
    """Independent zero-mean Gaussian perturbation on each arrival time."""
    toas = np.asarray(toas, dtype=float)
    if sigma_t < 0:
        raise ValueError(f"sigma_t must be >= 0, got {sigma_t}")
    if sigma_t == 0:
        return toas.copy()
    return toas + sigma_t * rng.standard_normal(toas.shape)


def run_rng(seed: int, run_index: int) -> np.random.Generator:
    """Counter-based generator for one Monte Carlo run."""
    return np.random.Generator(np.random.Philox(key=np.array(
        [seed, run_index], dtype=np.uint64)))


@dataclass(frozen=True)
class MonteCarloConfig:
    room: RoomGeometry
    sensors: SensorArray
    source: tuple[float, float]
    profile: VelocityProfile
    sigma_t_list: tuple[float, ...]
    runs_mc: int
    grid: tuple[int, int]
    c_hat: float
    rng_seed: int
    region_grid: tuple[int, int] = (200, 200)

    def __post_init__(self):
        if self.runs_mc < 1:
            raise ValueError(f"runs_mc must be >= 1, got {self.runs_mc}")
        if any(s < 0 for s in self.sigma_t_list):
            raise ValueError("sigma_t values must be >= 0")
        if not self.room.contains(self.source):
            raise ValueError(f"source {self.source} outside room")
        if self.c_hat <= 0:
            raise ValueError(f"c_hat must be > 0, got {self.c_hat}")


@dataclass(frozen=True)
class ReportRow:
    algorithm: Algorithm
    sigma_t: float
    rmse: float
    runs: int
    seed: int


@dataclass(frozen=True, eq=False)
class MonteCarloReport:
    rows: tuple[ReportRow, ...]
    rng_algorithm: str = RNG_ALGORITHM
    # per (algorithm, sigma_t) arrays of shape (runs, 2); only if requested
    estimates: dict = field(default_factory=dict)

    def rmse(self, algorithm: Algorithm, sigma_t: float) -> float:
        for row in self.rows:
            if row.algorithm is algorithm and row.sigma_t == sigma_t:
                return row.rmse
        raise KeyError(f"no row for {algorithm} at sigma_t={sigma_t}")


def _decode_region_batch(signs: np.ndarray,
                         region_map: RegionMap) -> np.ndarray:
    """Mean tied-centroid estimate for each row of a sign matrix."""
    length = signs.shape[1]
    dots = signs.astype(np.float64) @ region_map.codeword_matrix.T.astype(
        np.float64)
    costs = (length - dots) / 2.0
    best = costs.min(axis=1, keepdims=True)
    tied = costs == best
    weights = tied / tied.sum(axis=1, keepdims=True)
    return weights @ region_map.centroid_matrix


def run_monte_carlo(cfg: MonteCarloConfig, algorithms=None,
                    region_map: RegionMap | None = None,
                    keep_estimates: bool = False) -> MonteCarloReport:
    """Run the benchmark and report RMSE per (algorithm, sigma_t)."""
    if algorithms is None:
        algorithms = (Algorithm.SO_TDOA_REGION, Algorithm.SO_TDOA_GRID,
                      Algorithm.HYPERBOLIC)
    sensors = cfg.sensors
    source = np.asarray(cfg.source, dtype=float)
    toas_true = simulate_toas(source, sensors, cfg.profile)
    n = sensors.n_sensors
    ii, jj = pair_index_arrays(n)

    # per-run noise, drawn level by level from each run's own generator
    n_sigma = len(cfg.sigma_t_list)
    eps = np.empty((cfg.runs_mc, n_sigma, n))
    for run in range(cfg.runs_mc):
        gen = run_rng(cfg.rng_seed, run)
        for s in range(n_sigma):
            eps[run, s] = gen.standard_normal(n)

    grid_points = make_grid(cfg.room, *cfg.grid)
    needs_grid_codes = Algorithm.SO_TDOA_GRID in algorithms
    needs_ranges = Algorithm.HYPERBOLIC in algorithms
    grid_codes = (characteristic_matrix(grid_points, sensors).astype(np.float64)
                  if needs_grid_codes else None)
    grid_ranges = (range_difference_matrix(grid_points, sensors)
                   if needs_ranges else None)
    if Algorithm.SO_TDOA_REGION in algorithms and region_map is None:
        region_map = enumerate_regions(cfg.room, sensors, cfg.region_grid)

    rows = []
    estimates: dict = {}
    for s, sigma in enumerate(cfg.sigma_t_list):
        toas = toas_true[None, :] + sigma * eps[:, s, :]
        tau = toas[:, ii] - toas[:, jj]
        signs = sign_with_tie(tau)
        for algo in algorithms:
            if algo is Algorithm.SO_TDOA_REGION:
                est = _decode_region_batch(signs, region_map)
            elif algo is Algorithm.SO_TDOA_GRID:
                dots = signs.astype(np.float64) @ grid_codes.T
                est = grid_points[np.argmin((tau.shape[1] - dots) / 2.0,
                                            axis=1)]
            else:
                target = cfg.c_hat * tau
                res = (np.sum(target**2, axis=1, keepdims=True)
                       - 2.0 * target @ grid_ranges.T
                       + np.sum(grid_ranges**2, axis=1)[None, :])
                est = grid_points[np.argmin(res, axis=1)]
            sq_err = np.sum((est - source[None, :])**2, axis=1)
            rows.append(ReportRow(algorithm=algo, sigma_t=float(sigma),
                                  rmse=float(np.sqrt(sq_err.mean())),
                                  runs=cfg.runs_mc, seed=cfg.rng_seed))
            if keep_estimates:
                estimates[(algo, float(sigma))] = est.copy()
    return MonteCarloReport(rows=tuple(rows), estimates=estimates)


def report_to_csv_text(report: MonteCarloReport) -> str:
    lines = [f"# rng,{report.rng_algorithm}",
             "algorithm,sigma_t_s,rmse_m,runs,seed"]
    for row in report.rows:
        lines.append(f"{row.algorithm.value},{row.sigma_t:.17g},"
                     f"{row.rmse:.17g},{row.runs},{row.seed}")
    return "\n".join(lines) + "\n"


def report_to_csv(report: MonteCarloReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report_to_csv_text(report))


def estimates_to_csv(report: MonteCarloReport, path) -> None:
    """Per-run estimate dump for plotting error clouds."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("algorithm,sigma_t_s,run,est_x_m,est_y_m\n")
        for (algo, sigma), est in report.estimates.items():
            for run, (x, y) in enumerate(est):
                fh.write(f"{algo.value},{sigma:.17g},{run},"
                         f"{x:.17g},{y:.17g}\n")


def grid_sensor_layout(room: RoomGeometry, nx: int, ny: int,
                       margin: float) -> SensorArray:
    """nx x ny sensor grid inset by a margin from the room walls."""
    xs = np.linspace(margin, room.lx - margin, nx)
    ys = np.linspace(margin, room.ly - margin, ny)
    gx, gy = np.meshgrid(xs, ys)
    return SensorArray(positions=np.column_stack([gx.ravel(), gy.ravel()]))
