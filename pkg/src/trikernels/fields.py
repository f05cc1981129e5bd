"""Vector-field services built on TRI kernels.

Minimal-norm interpolation of point constraints, evaluation of fields
spanned by kernel translates, and the pointwise divergence / rotational
intensity of single-center fields.  The interpolation problem

    u(x_a) = beta_a  for all a,   |u| minimal in the kernel's space

is solved by one symmetric positive-definite solve against the block
Gram matrix of d x d kernel blocks; the solution is the span of kernel
translates at the constraint points with the solved coefficients as
momenta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .kernels import ZERO_RADIUS, TriKernel, eval_matrix, ktilde, partial_matrix

MIN_SEPARATION = 1e-9


class NearSingularMatrixError(RuntimeError):
    """Block Gram matrix could not be factored, even with jitter."""

    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


@dataclass(frozen=True)
class LandmarkConfig:
    """An ordered set of pairwise-distinct points in R^d."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2:
            raise ValueError("points must be an (N, d) array")
        if len(pts) > 1:
            diffs = pts[:, None, :] - pts[None, :, :]
            dist = np.linalg.norm(diffs, axis=-1)
            np.fill_diagonal(dist, np.inf)
            if dist.min() <= MIN_SEPARATION:
                raise ValueError("landmarks must be pairwise distinct")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class MomentaSet:
    """Coefficient vectors attached to a landmark configuration."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        object.__setattr__(self, "vectors", v)
        if v.ndim != 2:
            raise ValueError("vectors must be an (N, d) array")

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class BlockKernelMatrix:
    """Dense (N d) x (N d) Gram matrix of kernel blocks."""

    n_landmarks: int
    dim: int
    matrix: np.ndarray


@dataclass(frozen=True)
class InterpolationResult:
    momenta: MomentaSet
    interpolant: Callable
    norm_sq: float
    jittered: bool = False


def assemble_block_matrix(k: TriKernel, cfg: LandmarkConfig) -> BlockKernelMatrix:
    """Gram matrix with block (a, b) = k(x_a - x_b); symmetric by parity."""
    if k.dim != cfg.dim:
        raise ValueError("kernel and landmark dimensions differ")
    n, d = cfg.n, cfg.dim
    out = np.zeros((n * d, n * d))
    eye = np.eye(d)
    for a in range(n):
        out[a * d:(a + 1) * d, a * d:(a + 1) * d] = k.k0 * eye
        for b in range(a + 1, n):
            blk = eval_matrix(k, cfg.points[a] - cfg.points[b])
            out[a * d:(a + 1) * d, b * d:(b + 1) * d] = blk
            out[b * d:(b + 1) * d, a * d:(a + 1) * d] = blk.T
    return BlockKernelMatrix(n_landmarks=n, dim=d, matrix=out)


def field_apply(k: TriKernel, centers: np.ndarray, momenta: np.ndarray,
                points: np.ndarray) -> np.ndarray:
    """Sum_b k(y - x_b) alpha_b evaluated at a batch of points.

    Uses k(x)alpha = kperp(r) alpha + ktilde(r) (x . alpha) x, which
    avoids assembling any matrices; vectorized over points and centers.
    """
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    diffs = pts[:, None, :] - centers[None, :, :]          # (M, N, d)
    r = np.linalg.norm(diffs, axis=-1)                      # (M, N)
    rs = np.maximum(r, ZERO_RADIUS)
    kperp = k.k_perp(rs)
    kt = ktilde(k, rs)
    dot = np.einsum("mnd,nd->mn", diffs, momenta)
    contrib = kperp[..., None] * momenta[None, :, :] + (kt * dot)[..., None] * diffs
    contrib = np.where((r < ZERO_RADIUS)[..., None],
                       k.k0 * np.broadcast_to(momenta, contrib.shape), contrib)
    out = contrib.sum(axis=1)
    return out[0] if single else out


def snapshot_field(k: TriKernel, cfg: LandmarkConfig, momenta: MomentaSet) -> Callable:
    """Closure y -> sum_b k(y - x_b) alpha_b, safe for concurrent batch use."""
    if momenta.n != cfg.n or momenta.dim != cfg.dim:
        raise ValueError("momenta shape must match the landmark configuration")
    centers = cfg.points.copy()
    vecs = momenta.vectors.copy()

    def field(points):
        return field_apply(k, centers, vecs, points)

    return field


def interpolate(k: TriKernel, cfg: LandmarkConfig, targets) -> InterpolationResult:
    """Minimal-norm field matching u(x_a) = beta_a at every landmark.

    Solves the SPD block system by Cholesky; a failed factorization gets
    one retry with diagonal jitter 1e-12 * trace/(N d) before raising
    NearSingularMatrixError (coalescing points or a non-strictly-positive
    kernel).
    """
    beta = targets.vectors if isinstance(targets, MomentaSet) else \
        np.atleast_2d(np.asarray(targets, dtype=float))
    if beta.shape != (cfg.n, cfg.dim):
        raise ValueError("targets must be an (N, d) array")
    gram = assemble_block_matrix(k, cfg).matrix
    rhs = beta.ravel()
    jittered = False
    try:
        factor = cho_factor(gram, check_finite=False)
    except LinAlgError:
        jittered = True
        jitter = 1e-12 * np.trace(gram) / gram.shape[0]
        try:
            factor = cho_factor(gram + jitter * np.eye(gram.shape[0]),
                                check_finite=False)
        except LinAlgError:
            raise NearSingularMatrixError(
                "block kernel matrix is not positive definite",
                condition=float(np.linalg.cond(gram))) from None
    alpha = cho_solve(factor, rhs, check_finite=False)
    norm_sq = float(alpha @ rhs)
    mom = MomentaSet(alpha.reshape(cfg.n, cfg.dim))
    return InterpolationResult(momenta=mom,
                               interpolant=snapshot_field(k, cfg, mom),
                               norm_sq=norm_sq,
                               jittered=jittered)


def divergence_at(k: TriKernel, x, alpha) -> float:
    """Divergence of y -> k(y)alpha at x != 0.

    Equals (alpha . xhat) [ (d-1)(kpar - kperp)/r + kpar'(r) ].
    """
    x = np.asarray(x, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    r = float(np.linalg.norm(x))
    if r < ZERO_RADIUS:
        raise ValueError("divergence formula needs x != 0")
    radial = (k.dim - 1) * r * float(ktilde(k, r)) + float(k.dk_par(r))
    return float(alpha @ x) / r * radial


def curl_magnitude_at(k: TriKernel, x, alpha) -> float:
    """Rotational intensity of y -> k(y)alpha at x != 0.

    The scalar factor (kpar - kperp)/r - kperp'(r) times |alpha ^ x| / r,
    the norm of the wedge of the two vectors.  In the plane this matches
    the scalar curl of the field up to orientation sign; in R^3 it is
    (up to the same sign) the Euclidean norm of the classical curl.
    """
    x = np.asarray(x, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    r = float(np.linalg.norm(x))
    if r < ZERO_RADIUS:
        raise ValueError("curl formula needs x != 0")
    factor = r * float(ktilde(k, r)) - float(k.dk_perp(r))
    # |alpha ^ x|^2 as the sum of squared 2x2 minors: exact for parallel vectors
    minors = np.outer(alpha, x) - np.outer(x, alpha)
    wedge = math.sqrt(0.5 * float(np.sum(minors * minors)))
    return factor * wedge / r


def field_zero(k: TriKernel, alpha, x0, tol: float = 1e-12,
               max_iter: int = 60) -> np.ndarray:
    """Newton search for a zero of the single-center field y -> k(y)alpha.

    The Jacobian columns are the coordinate derivatives of the kernel
    matrix applied to alpha.
    """
    alpha = np.asarray(alpha, dtype=float)
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(max_iter):
        v = eval_matrix(k, x) @ alpha
        if np.linalg.norm(v) < tol:
            return x
        # column i holds the derivative of the field along axis i
        jac = np.column_stack([partial_matrix(k, x, i) @ alpha for i in range(k.dim)])
        step = np.linalg.solve(jac, v)
        x = x - step
    raise RuntimeError("field zero search did not converge")
