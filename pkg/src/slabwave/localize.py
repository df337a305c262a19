"""Source-position estimators driven by a TDOA vector.

Two families are provided.  The sign-only (SO-TDOA) estimators use nothing
but the sign pattern of the TDOA vector: either decoded against a
precomputed region map (estimate = mean centroid of all Hamming-minimal
regions) or matched against the sign pattern of every point of a search
grid.  The hyperbolic baseline converts time differences to range
differences with an assumed propagation speed c_hat and picks the grid
point with the smallest residual; unlike the sign-only variants its answer
depends on how well c_hat matches the medium.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .arrival import TdoaVector, sign_vector
from .errors import EmptyMapError, LengthMismatchError
from .regions import (
    RegionMap,
    SensorArray,
    characteristic_matrix,
    hamming_to_many,
    pair_index_arrays,
    sign_with_tie,
)
from .synth import RoomGeometry


class Algorithm(enum.Enum):
    SO_TDOA_REGION = "so-tdoa"
    SO_TDOA_GRID = "so-tdoa-grid"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class LocalizationResult:
    estimate: tuple[float, float]
    algorithm: Algorithm
    tied_regions: frozenset[int] = field(default_factory=frozenset)
    cost: float = 0.0  # Hamming count or residual in meters

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError(f"cost must be >= 0, got {self.cost}")


def make_grid(room: RoomGeometry, nx: int, ny: int) -> np.ndarray:
    """Regular (nx x ny) search grid including the room boundary,
    row-major from the room origin."""
    xs = np.linspace(0.0, room.lx, nx)
    ys = np.linspace(0.0, room.ly, ny)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def range_difference_matrix(points: np.ndarray,
                            sensors: SensorArray) -> np.ndarray:
    """d_p(l) = d_pi - d_pj for every point, canonical pair order."""
    points = np.asarray(points, dtype=float)
    dists = np.linalg.norm(points[:, None, :] - sensors.positions[None, :, :],
                           axis=2)
    ii, jj = pair_index_arrays(sensors.n_sensors)
    return dists[:, ii] - dists[:, jj]


def localize_so_tdoa(tau: TdoaVector,
                     region_map: RegionMap) -> LocalizationResult:
    """Decode the TDOA sign pattern against the region map.

    The estimate is the mean of the centroids of every region tied at the
    minimal Hamming distance.
    """
    if region_map.n_regions == 0:
        raise EmptyMapError("region map holds no regions")
    if len(tau) != region_map.sensors.n_pairs:
        raise LengthMismatchError(
            f"TDOA length {len(tau)} vs map pair count "
            f"{region_map.sensors.n_pairs}")
    z = sign_vector(tau).as_array()
    costs = hamming_to_many(z, region_map.codeword_matrix)
    best = costs.min()
    tied = np.flatnonzero(costs == best)
    centroid = region_map.centroid_matrix[tied].mean(axis=0)
    return LocalizationResult(
        estimate=(float(centroid[0]), float(centroid[1])),
        algorithm=Algorithm.SO_TDOA_REGION,
        tied_regions=frozenset(int(k) for k in tied),
        cost=float(best))


def localize_so_tdoa_grid(tau: TdoaVector, sensors: SensorArray,
                          grid_points: np.ndarray) -> LocalizationResult:
    """Grid point whose sign pattern is Hamming-closest to the measured one.

    Ties resolve to the lowest scan index (row-major from the room origin),
    which keeps the result order-independent and seed-free.
    """
    grid_points = np.asarray(grid_points, dtype=float)
    if grid_points.size == 0:
        raise ValueError("grid_points must not be empty")
    z = sign_vector(tau).as_array()
    codes = characteristic_matrix(grid_points, sensors)
    costs = hamming_to_many(z, codes)
    idx = int(np.argmin(costs))
    return LocalizationResult(
        estimate=(float(grid_points[idx, 0]), float(grid_points[idx, 1])),
        algorithm=Algorithm.SO_TDOA_GRID,
        cost=float(costs[idx]))


def localize_hyperbolic(tau: TdoaVector, c_hat: float, sensors: SensorArray,
                        grid_points: np.ndarray) -> LocalizationResult:
    """Grid point minimizing || c_hat * tau - d_p ||_2.

    c_hat converts the measured time differences into range differences;
    d_p is each grid point's geometric range-difference vector.
    """
    if c_hat <= 0:
        raise ValueError(f"c_hat must be > 0, got {c_hat}")
    grid_points = np.asarray(grid_points, dtype=float)
    if grid_points.size == 0:
        raise ValueError("grid_points must not be empty")
    if len(tau) != sensors.n_pairs:
        raise LengthMismatchError(
            f"TDOA length {len(tau)} vs sensor pair count {sensors.n_pairs}")
    target = c_hat * tau.as_array()
    diffs = range_difference_matrix(grid_points, sensors) - target[None, :]
    residuals = np.linalg.norm(diffs, axis=1)
    idx = int(np.argmin(residuals))
    return LocalizationResult(
        estimate=(float(grid_points[idx, 0]), float(grid_points[idx, 1])),
        algorithm=Algorithm.HYPERBOLIC,
        cost=float(residuals[idx]))


def results_to_csv(results, path) -> None:
    """Write localization rows: algorithm, est_x, est_y, cost, tied ids."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("algorithm,est_x_m,est_y_m,cost,tied_region_ids\n")
        for r in results:
            tied = ";".join(str(k) for k in sorted(r.tied_regions))
            fh.write(f"{r.algorithm.value},{r.estimate[0]:.17g},"
                     f"{r.estimate[1]:.17g},{r.cost:.17g},{tied}\n")
