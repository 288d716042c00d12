"""Service-area geometry, node placement and user-centric AP association.

The service area is a square torus: distances use the per-axis minimum
image, combined with the vertical AP/user height gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, EmptyLayoutError

__all__ = [
    "NetworkLayout",
    "AssociationMap",
    "place_uniform",
    "wrap_distance",
    "pairwise_wrap_distance",
    "make_layout",
    "associate_users",
]


@dataclass(frozen=True)
class NetworkLayout:
    """AP and user positions on a wrap-around square.

    Positions are ``(n, 2)`` arrays in meters.
    """

    side_length: float
    ap_positions: np.ndarray
    user_positions: np.ndarray
    ap_height: float = 10.0
    user_height: float = 1.65

    def __post_init__(self):
        for name in ("ap_positions", "user_positions"):
            pts = np.asarray(getattr(self, name), dtype=float).reshape(-1, 2)
            if np.any(pts < 0) or np.any(pts >= self.side_length):
                raise ConfigurationError(f"{name} must lie in [0, side_length)")
            pts.setflags(write=False)
            object.__setattr__(self, name, pts)
        if not self.ap_height > self.user_height > 0:
            raise ConfigurationError("need ap_height > user_height > 0")

    @property
    def n_aps(self) -> int:
        return self.ap_positions.shape[0]

    @property
    def n_users(self) -> int:
        return self.user_positions.shape[0]

    @property
    def height_gap(self) -> float:
        return self.ap_height - self.user_height

    def user_ap_distances(self) -> np.ndarray:
        """3-D user-to-AP distances, shape ``(n_users, n_aps)``."""
        return pairwise_wrap_distance(
            self.user_positions, self.ap_positions, self.side_length, self.height_gap
        )

    def user_user_distances(self) -> np.ndarray:
        """Horizontal wrap-around distances between users."""
        return pairwise_wrap_distance(
            self.user_positions, self.user_positions, self.side_length, 0.0
        )


@dataclass(frozen=True)
class AssociationMap:
    """Which APs serve which users.

    ``serving_aps[u]`` lists AP indices by decreasing large-scale gain;
    ``served_users[a]`` is its transpose, in increasing user order.
    """

    serving_aps: tuple[tuple[int, ...], ...]
    served_users: tuple[tuple[int, ...], ...]
    cluster_size: int

    @property
    def n_users(self) -> int:
        return len(self.serving_aps)

    @property
    def n_aps(self) -> int:
        return len(self.served_users)

    def mask(self) -> np.ndarray:
        """Boolean ``(n_aps, n_users)`` matrix, True where AP serves user."""
        m = np.zeros((self.n_aps, self.n_users), dtype=bool)
        for u, aps in enumerate(self.serving_aps):
            m[list(aps), u] = True
        return m

    def users_per_ap(self) -> np.ndarray:
        return np.array([len(us) for us in self.served_users], dtype=int)

    @classmethod
    def from_serving(cls, serving_aps, n_aps: int) -> "AssociationMap":
        serving = tuple(tuple(int(a) for a in aps) for aps in serving_aps)
        sizes = {len(aps) for aps in serving}
        if len(sizes) != 1:
            raise ConfigurationError("every user needs the same cluster size")
        served = [[] for _ in range(n_aps)]
        for u, aps in enumerate(serving):
            if len(set(aps)) != len(aps):
                raise ConfigurationError(f"user {u} lists an AP twice")
            for a in aps:
                if not 0 <= a < n_aps:
                    raise ConfigurationError(f"AP index {a} out of range")
                served[a].append(u)
        return cls(serving, tuple(tuple(us) for us in served), sizes.pop())


def place_uniform(count: int, side_length: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` i.i.d. uniform points in ``[0, side_length)^2``."""
    if count < 1:
        raise EmptyLayoutError("cannot place zero nodes")
    if side_length <= 0:
        raise ConfigurationError("side_length must be positive")
    pts = rng.uniform(0.0, side_length, size=(count, 2))
    # uniform() can round up to the open endpoint for large side lengths
    return np.minimum(pts, np.nextafter(side_length, 0.0))


def wrap_distance(p, q, side_length: float, height_gap: float = 0.0) -> float:
    """Torus distance between two points, combined with a vertical gap."""
    d = np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float))
    d = np.minimum(d, side_length - d)
    return float(np.sqrt(np.sum(d**2) + height_gap**2))


def pairwise_wrap_distance(P: np.ndarray, Q: np.ndarray, side_length: float,
                           height_gap: float = 0.0) -> np.ndarray:
    """Vectorized :func:`wrap_distance` for every row pair of ``P`` and ``Q``."""
    d = np.abs(P[:, None, :] - Q[None, :, :])
    d = np.minimum(d, side_length - d)
    return np.sqrt(np.sum(d**2, axis=-1) + height_gap**2)


def make_layout(n_aps: int, n_users: int, side_length: float, rng: np.random.Generator,
                ap_height: float = 10.0, user_height: float = 1.65) -> NetworkLayout:
    aps = place_uniform(n_aps, side_length, rng)
    users = place_uniform(n_users, side_length, rng)
    return NetworkLayout(side_length, aps, users, ap_height, user_height)


def associate_users(beta: np.ndarray, cluster_size: int) -> AssociationMap:
    """Serve each user by the ``cluster_size`` APs with the largest gain.

    Ties go to the lower AP index.
    """
    beta = np.asarray(beta, dtype=float)
    if beta.ndim != 2:
        raise ConfigurationError("beta must be an (n_users, n_aps) matrix")
    if not np.all(np.isfinite(beta)):
        raise ConfigurationError("beta must be finite")
    n_users, n_aps = beta.shape
    if not 1 <= cluster_size <= n_aps:
        raise ConfigurationError(
            f"cluster_size={cluster_size} must be in [1, n_aps={n_aps}]")
    # stable sort on -beta keeps lower indices first among equal gains
    order = np.argsort(-beta, axis=1, kind="stable")[:, :cluster_size]
    return AssociationMap.from_serving(order, n_aps)
