"""Geometry of the sign-code region partition.

Every sensor pair (i, j) splits the plane along the perpendicular bisector
of the segment joining them.  A point's characteristic vector collects
sgn(d_i - d_j) over all pairs in the canonical order
(1,2), (1,3), (2,3), (1,4), ..., (N-1,N); all points of one bisector cell
share the same vector.  Cells are enumerated by classifying a regular grid
of points, and a measured sign vector is decoded to the cell(s) whose
codeword minimizes the Hamming distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadPairError,
    DegenerateGridError,
    EmptyMapError,
    LengthMismatchError,
)
from .synth import RoomGeometry

_REGIONS_FORMAT_VERSION = 1


def pair_index(i: int, j: int, n: int) -> int:
    """1-based position of pair (i, j), i < j, in the canonical order:
    l = (j - 2)(j - 1)/2 + i."""
    if not (1 <= i < j <= n):
        raise BadPairError(f"need 1 <= i < j <= {n}, got ({i}, {j})")
    return (j - 2) * (j - 1) // 2 + i


def pair_order(n: int) -> list[tuple[int, int]]:
    """All sensor pairs as 0-based (i, j) tuples in canonical order."""
    if n < 2:
        raise BadPairError(f"need at least 2 sensors, got {n}")
    pairs = []
    for j in range(2, n + 1):
        for i in range(1, j):
            pairs.append((i - 1, j - 1))
    return pairs


def pair_index_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """0-based (i, j) index arrays following the canonical pair order."""
    pairs = pair_order(n)
    idx = np.asarray(pairs, dtype=int)
    return idx[:, 0], idx[:, 1]


def sign_with_tie(x):
    """Sign in {+1, -1} with ties mapped to +1."""
    return np.where(np.asarray(x) >= 0, 1, -1).astype(np.int8)


@dataclass(frozen=True)
class SensorArray:
    """Known sensor positions, shape (N, 2) in meters."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must be (N, 2), got {pos.shape}")
        # 2 sensors are enough for the pure geometry; localization needs >= 3
        if pos.shape[0] < 2:
            raise ValueError("need at least 2 sensors")
        if len(np.unique(pos, axis=0)) != pos.shape[0]:
            raise ValueError("sensor positions must be pairwise distinct")
        object.__setattr__(self, "positions", pos)

    @property
    def n_sensors(self) -> int:
        return self.positions.shape[0]

    @property
    def n_pairs(self) -> int:
        n = self.n_sensors
        return n * (n - 1) // 2


@dataclass(frozen=True)
class CharacteristicVector:
    """+-1 codeword over all sensor pairs, canonical order."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (-1, 1) for b in bits):
            raise ValueError("codeword entries must be +1 or -1")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.bits)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.bits, dtype=np.int8)


def characteristic_vector(point, sensors: SensorArray) -> CharacteristicVector:
    """Codeword of a single point: bit l = sgn(|p - g_i| - |p - g_j|)."""
    bits = characteristic_matrix(np.asarray(point, dtype=float)[None, :],
                                 sensors)[0]
    return CharacteristicVector(bits=tuple(int(b) for b in bits))


def characteristic_matrix(points: np.ndarray,
                          sensors: SensorArray) -> np.ndarray:
    """Codewords of many points at once, shape (P, N(N-1)/2), int8."""
    points = np.asarray(points, dtype=float)
    dists = np.linalg.norm(points[:, None, :] - sensors.positions[None, :, :],
                           axis=2)
    ii, jj = pair_index_arrays(sensors.n_sensors)
    return sign_with_tie(dists[:, ii] - dists[:, jj])


def hamming(z1, z2) -> int:
    """Number of differing positions between two equal-length codewords."""
    a = z1.as_array() if isinstance(z1, CharacteristicVector) else np.asarray(z1)
    b = z2.as_array() if isinstance(z2, CharacteristicVector) else np.asarray(z2)
    if a.shape != b.shape:
        raise LengthMismatchError(f"codeword lengths differ: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


def hamming_to_many(z: np.ndarray, codewords: np.ndarray) -> np.ndarray:
    """Hamming distances from one +-1 vector to each row of a +-1 matrix.

    For +-1 entries, d_H = (L - z . c) / 2, which turns the scan into a
    single matrix product.
    """
    if z.shape[0] != codewords.shape[1]:
        raise LengthMismatchError(
            f"codeword length {z.shape[0]} vs map length {codewords.shape[1]}")
    dots = codewords.astype(np.float64) @ z.astype(np.float64)
    return ((z.shape[0] - dots) / 2.0).astype(int)


@dataclass(frozen=True)
class Region:
    id: int
    codeword: CharacteristicVector
    centroid: tuple[float, float]
    cell_count: int


@dataclass(frozen=True, eq=False)
class RegionMap:
    """Enumerated bisector regions of a sensor layout inside a room."""

    regions: tuple[Region, ...]
    grid_resolution: tuple[int, int]
    room: RoomGeometry
    sensors: SensorArray
    codeword_matrix: np.ndarray = field(repr=False)   # (Q, L) int8
    centroid_matrix: np.ndarray = field(repr=False)   # (Q, 2) float

    @property
    def n_regions(self) -> int:
        return len(self.regions)


def region_upper_bound(n: int) -> int:
    """Most regions N sensors can carve in an unbounded plane:
    M_R = (n^4 - 2 n^3 + 3 n^2 - 2 n)/8 + 1."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return (n**4 - 2 * n**3 + 3 * n**2 - 2 * n) // 8 + 1


def grid_cell_centers(room: RoomGeometry, nx: int, ny: int) -> np.ndarray:
    """Cell-center points of an nx x ny partition of the room, row-major
    from the room origin (y varies slowest)."""
    xs = (np.arange(nx) + 0.5) * (room.lx / nx)
    ys = (np.arange(ny) + 0.5) * (room.ly / ny)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def enumerate_regions(room: RoomGeometry, sensors: SensorArray,
                      grid: tuple[int, int] = (200, 200)) -> RegionMap:
    """Enumerate bisector regions by classifying grid cell centers.

    Identical codewords are grouped; each group's centroid is the mean of
    its member points.  Region ids are assigned in codeword sort order.
    """
    nx, ny = grid
    if nx < 10 or ny < 10:
        raise DegenerateGridError(f"grid must be at least 10 x 10, got {grid}")
    points = grid_cell_centers(room, nx, ny)
    codes = characteristic_matrix(points, sensors)
    unique_codes, inverse = np.unique(codes, axis=0, return_inverse=True)
    q = unique_codes.shape[0]
    counts = np.bincount(inverse, minlength=q)
    centroids = np.zeros((q, 2))
    np.add.at(centroids, inverse, points)
    centroids /= counts[:, None]
    regions = tuple(
        Region(id=k,
               codeword=CharacteristicVector(tuple(int(b)
                                                   for b in unique_codes[k])),
               centroid=(float(centroids[k, 0]), float(centroids[k, 1])),
               cell_count=int(counts[k]))
        for k in range(q))
    return RegionMap(regions=regions, grid_resolution=(nx, ny), room=room,
                     sensors=sensors, codeword_matrix=unique_codes,
                     centroid_matrix=centroids)


def decode(z_s, region_map: RegionMap) -> set[int]:
    """Region ids whose codewords minimize the Hamming distance to z_s
    (all ties included)."""
    if region_map.n_regions == 0:
        raise EmptyMapError("region map holds no regions")
    z = z_s.as_array() if isinstance(z_s, CharacteristicVector) else np.asarray(z_s)
    costs = hamming_to_many(z, region_map.codeword_matrix)
    best = costs.min()
    return set(int(k) for k in np.flatnonzero(costs == best))


def _codeword_str(cv: CharacteristicVector) -> str:
    return "".join("+" if b > 0 else "-" for b in cv.bits)


def _codeword_from_str(s: str) -> CharacteristicVector:
    if any(ch not in "+-" for ch in s):
        raise ValueError(f"bad codeword string {s!r}")
    return CharacteristicVector(tuple(1 if ch == "+" else -1 for ch in s))


def save_region_map(region_map: RegionMap, path) -> None:
    """Persist the map as a self-describing CSV bundle."""
    lines = [
        f"# slabwave-regions v{_REGIONS_FORMAT_VERSION}",
        f"# room,{region_map.room.lx:.17g},{region_map.room.ly:.17g}",
        f"# grid,{region_map.grid_resolution[0]},{region_map.grid_resolution[1]}",
    ]
    for k, (x, y) in enumerate(region_map.sensors.positions):
        lines.append(f"# sensor,{k},{x:.17g},{y:.17g}")
    lines.append("id,codeword,centroid_x,centroid_y,cell_count")
    for r in region_map.regions:
        lines.append(f"{r.id},{_codeword_str(r.codeword)},"
                     f"{r.centroid[0]:.17g},{r.centroid[1]:.17g},{r.cell_count}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_region_map(path) -> RegionMap:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or not text[0].startswith("# slabwave-regions v"):
        raise ValueError(f"{path} is not a region-map bundle")
    version = int(text[0].rsplit("v", 1)[1])
    if version != _REGIONS_FORMAT_VERSION:
        raise ValueError(f"unsupported region-map version {version}")
    room = None
    grid = None
    sensor_rows = []
    body_start = None
    for ln, line in enumerate(text[1:], start=1):
        if line.startswith("# room,"):
            _, lx, ly = line[2:].split(",")
            room = RoomGeometry(lx=float(lx), ly=float(ly))
        elif line.startswith("# grid,"):
            _, gx, gy = line[2:].split(",")
            grid = (int(gx), int(gy))
        elif line.startswith("# sensor,"):
            _, _, x, y = line[2:].split(",")
            sensor_rows.append((float(x), float(y)))
        elif line.startswith("id,"):
            body_start = ln + 1
            break
    if room is None or grid is None or not sensor_rows or body_start is None:
        raise ValueError(f"incomplete region-map header in {path}")
    sensors = SensorArray(positions=np.asarray(sensor_rows))
    regions = []
    for line in text[body_start:]:
        if not line.strip():
            continue
        rid, code, cx, cy, count = line.split(",")
        regions.append(Region(id=int(rid), codeword=_codeword_from_str(code),
                              centroid=(float(cx), float(cy)),
                              cell_count=int(count)))
    codeword_matrix = np.asarray([r.codeword.bits for r in regions],
                                 dtype=np.int8)
    centroid_matrix = np.asarray([r.centroid for r in regions], dtype=float)
    return RegionMap(regions=tuple(regions), grid_resolution=grid, room=room,
                     sensors=sensors, codeword_matrix=codeword_matrix,
                     centroid_matrix=centroid_matrix)
