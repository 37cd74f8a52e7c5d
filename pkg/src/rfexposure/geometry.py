"""Hexagonal site layouts, sectorization, UE drops and 3D distances.

Azimuths are in degrees, measured counter-clockwise from the +x axis and
wrapped to ``[0, 360)``.
"""
from dataclasses import dataclass
import math

import numpy as np

from .kernels import BACKEND

SUPPORTED_SECTORS = (3, 6)


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if self.z < 0:
            raise ValueError(f"height must be >= 0, got z={self.z}")

    def as_array(self):
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class SitePlan:
    isd: float
    rings: int = 2
    sectors_per_site: int = 3
    site_height: float = 10.0
    ue_height: float = 1.5

    def __post_init__(self):
        if not self.isd > 0:
            raise ValueError(f"isd must be > 0, got {self.isd}")
        if int(self.rings) != self.rings or self.rings < 0:
            raise ValueError(f"rings must be a non-negative integer, got {self.rings}")
        if self.sectors_per_site not in SUPPORTED_SECTORS:
            raise ValueError(f"sectors_per_site must be one of {SUPPORTED_SECTORS}, "
                             f"got {self.sectors_per_site}")
        if self.site_height < 0 or self.ue_height < 0:
            raise ValueError("heights must be >= 0")

    @property
    def sector_width(self):
        return 360.0 / self.sectors_per_site

    @property
    def sector_radius(self):
        return self.isd / math.sqrt(3.0)


@dataclass(frozen=True)
class SectorRegion:
    site_position: Position3D
    boresight_azimuth: float
    angular_width: float
    max_radius: float

    @property
    def start_azimuth(self):
        return (self.boresight_azimuth - self.angular_width / 2.0) % 360.0

    def contains(self, xy, tol=1e-9):
        """Boolean mask: plan-view points inside the wedge (angle and radius)."""
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        dx = xy[:, 0] - self.site_position.x
        dy = xy[:, 1] - self.site_position.y
        r = np.hypot(dx, dy)
        offset = azimuth_offset(np.degrees(np.arctan2(dy, dx)), self.boresight_azimuth)
        inside_angle = (np.abs(offset) <= self.angular_width / 2.0 + tol) | (r <= tol)
        return inside_angle & (r <= self.max_radius + tol)


def wrap_azimuth(az):
    return np.mod(az, 360.0)


def azimuth_offset(az, boresight):
    """Signed offset of ``az`` from ``boresight`` in ``[-180, 180)``."""
    return np.mod(np.asarray(az, dtype=float) - boresight + 180.0, 360.0) - 180.0


def _hex_axial(rings):
    # centre first, then ring by ring, walking each ring counter-clockwise
    coords = [(0, 0)]
    directions = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]
    for k in range(1, rings + 1):
        q, r = k, -k
        for dq, dr in [directions[(i + 1) % 6] for i in range(6)]:
            for _ in range(k):
                coords.append((q, r))
                q, r = q + dq, r + dr
    return coords


def generate_hex_layout(plan):
    """Site positions of a hexagonal lattice with ``plan.rings`` rings.

    Returns ``3*rings*(rings+1) + 1`` positions; neighbours are ``plan.isd``
    apart and one lattice axis is the x axis.
    """
    if plan.rings < 0 or not plan.isd > 0:
        raise ValueError("rings must be >= 0 and isd > 0")
    out = []
    for q, r in _hex_axial(int(plan.rings)):
        x = plan.isd * (q + r / 2.0)
        y = plan.isd * (r * math.sqrt(3.0) / 2.0)
        out.append(Position3D(x, y, plan.site_height))
    return out


def collinear_sites(start_m, end_m, isd, height):
    """Sites at integer multiples of ``isd`` covering ``[start_m, end_m]``.

    This is the line-sweep layout: all sites lie on the x axis.
    """
    k0 = math.floor(start_m / isd + 1e-9)
    k1 = math.ceil(end_m / isd - 1e-9)
    return [Position3D(k * isd, 0.0, height) for k in range(k0, k1 + 1)]


def sectorize(site, sectors_per_site, max_radius=math.inf):
    if sectors_per_site not in SUPPORTED_SECTORS:
        raise ValueError(f"unsupported sector count {sectors_per_site}; "
                         f"expected one of {SUPPORTED_SECTORS}")
    width = 360.0 / sectors_per_site
    return [SectorRegion(site, width / 2.0 + k * width, width, max_radius)
            for k in range(sectors_per_site)]


def sector_index(azimuth, sectors_per_site):
    """Index of the sector whose interval ``[k*w, (k+1)*w)`` holds ``azimuth``."""
    width = 360.0 / sectors_per_site
    idx = np.floor(wrap_azimuth(azimuth) / width).astype(int)
    return np.minimum(idx, sectors_per_site - 1)


def sample_sector_xy(sector, n, rng):
    """``n`` area-uniform plan-view points in the sector wedge."""
    r = sector.max_radius * np.sqrt(rng.random(n))
    theta = np.radians(sector.start_azimuth + sector.angular_width * rng.random(n))
    x = sector.site_position.x + r * np.cos(theta)
    y = sector.site_position.y + r * np.sin(theta)
    return np.column_stack([x, y])


def drop_ues(sector, n, seed, ue_height=1.5):
    """Drop ``n`` UEs uniformly over the sector at height ``ue_height``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return []
    if not math.isfinite(sector.max_radius):
        raise ValueError("sector max_radius must be finite to drop UEs")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    xy = sample_sector_xy(sector, n, rng)
    return [Position3D(float(x), float(y), ue_height) for x, y in xy]


def distance_3d(a, b):
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


def distance_2d(a, b):
    return math.hypot(a.x - b.x, a.y - b.y)


def positions_array(positions):
    if len(positions) == 0:
        return np.empty((0, 3))
    return np.array([[p.x, p.y, p.z] for p in positions], dtype=float)


def nearest_sites(ues, sites, backend=None):
    """Vectorized serving-site search on ``(n, 3)`` and ``(m, 3)`` arrays."""
    kern = backend or BACKEND
    ues = np.ascontiguousarray(ues, dtype=np.float64).reshape(-1, 3)
    sites = np.ascontiguousarray(sites, dtype=np.float64).reshape(-1, 3)
    if sites.shape[0] == 0:
        raise ValueError("site list is empty")
    return kern.nearest_site(ues, sites)


def serving_site(ue, sites):
    """``(index, distance)`` of the nearest site in 3D; ties go to the lowest index."""
    if not sites:
        raise ValueError("site list is empty")
    idx, dist = nearest_sites(ue.as_array()[None, :], positions_array(sites))
    return int(idx[0]), float(dist[0])
