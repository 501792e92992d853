"""Kernels, Gram matrices, and the input-norm bound constant.

Three kernels cover every experiment in the package:

* ``gaussian``: K(x, x') = exp(-||x - x'||^2 / (2 sigma^2)), any dimension.
* ``sobolev``: K(x, y) = min(x, y) * (1 - max(x, y)) on [0, 1], scalar
  inputs only (first-order spline kernel vanishing at both endpoints).
* ``linear``: K(x, x') = <x, x'>, which realizes the plain Euclidean
  hypothesis space through the kernel interface.

``kappa_sq`` is the uniform bound on K(x, x) used to normalize step
sizes. For gaussian and sobolev it is the analytic supremum (1 and 1/4),
not a data estimate, so step-size normalization carries no sampling
noise.
"""

from dataclasses import dataclass

import numpy as np

from .errors import KernelDomainError

KINDS = ("gaussian", "sobolev", "linear")

_SOBOLEV_SLACK = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its bandwidth, if any."""

    kind: str
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}, expected one of {KINDS}")
        if self.kind == "gaussian":
            if self.sigma is None or not np.isfinite(self.sigma) or self.sigma <= 0:
                raise ValueError(f"gaussian kernel needs a finite bandwidth sigma > 0, got {self.sigma}")
        elif self.sigma is not None:
            raise ValueError(f"{self.kind} kernel takes no bandwidth")

    def label(self) -> str:
        if self.kind == "gaussian":
            return f"gaussian(sigma={self.sigma})"
        return self.kind


def _as_points(x):
    """Normalize a point collection to shape (n,) for scalars or (n, d)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim > 2:
        raise ValueError(f"points must be at most 2-dimensional, got shape {arr.shape}")
    return arr


def _check_sobolev_domain(arr):
    lo, hi = float(np.min(arr)), float(np.max(arr))
    if lo < -_SOBOLEV_SLACK or hi > 1.0 + _SOBOLEV_SLACK:
        raise KernelDomainError(
            f"sobolev kernel is defined on [0, 1]; got values in [{lo:.6g}, {hi:.6g}]"
        )


def cross_matrix(spec: KernelSpec, xs, anchors) -> np.ndarray:
    """Matrix of kernel values K(xs[i], anchors[j]), shape (len(xs), len(anchors))."""
    xs = _as_points(xs)
    anchors = _as_points(anchors)
    if spec.kind == "gaussian":
        if xs.ndim == 1 and anchors.ndim == 1:
            sq = (xs[:, None] - anchors[None, :]) ** 2
        else:
            a = np.atleast_2d(xs) if xs.ndim == 1 else xs
            b = np.atleast_2d(anchors) if anchors.ndim == 1 else anchors
            if a.ndim == 1 or b.ndim == 1 or a.shape[1] != b.shape[1]:
                raise ValueError(
                    f"gaussian kernel inputs disagree in dimension: {xs.shape} vs {anchors.shape}"
                )
            sq = (
                np.sum(a**2, axis=1)[:, None]
                + np.sum(b**2, axis=1)[None, :]
                - 2.0 * (a @ b.T)
            )
            np.maximum(sq, 0.0, out=sq)
        return np.exp(-sq / (2.0 * spec.sigma**2))
    if spec.kind == "sobolev":
        if xs.ndim != 1 or anchors.ndim != 1:
            raise KernelDomainError("sobolev kernel takes scalar inputs")
        _check_sobolev_domain(xs)
        _check_sobolev_domain(anchors)
        lo = np.minimum(xs[:, None], anchors[None, :])
        hi = np.maximum(xs[:, None], anchors[None, :])
        return lo * (1.0 - hi)
    # linear
    a = xs[:, None] if xs.ndim == 1 else xs
    b = anchors[:, None] if anchors.ndim == 1 else anchors
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"linear kernel inputs disagree in dimension: {xs.shape} vs {anchors.shape}")
    return a @ b.T


def kernel_eval(spec: KernelSpec, x, xp) -> float:
    """Single kernel value K(x, x')."""
    x = np.asarray(x, dtype=np.float64)
    xp = np.asarray(xp, dtype=np.float64)
    if x.ndim == 0 and xp.ndim == 0:
        return float(cross_matrix(spec, x.reshape(1), xp.reshape(1))[0, 0])
    return float(cross_matrix(spec, x.reshape(1, -1), xp.reshape(1, -1))[0, 0])


@dataclass(frozen=True)
class GramMatrix:
    """Dense symmetric kernel matrix with its provenance spec.

    Symmetry is enforced by averaging with the transpose at build time,
    which removes floating-point asymmetry before any PSD-dependent use.
    """

    values: np.ndarray
    spec: KernelSpec

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.values)[0])


# Grams up to this size get an automatic full eigenvalue check at build
# time; larger ones only on request (the check is O(n^3)).
_AUTO_PSD_LIMIT = 256

_PSD_TOL = 1e-8


def build_gram(spec: KernelSpec, points, check_psd=None) -> GramMatrix:
    """Gram matrix of ``points`` under ``spec``.

    Parameters
    ----------
    points : array-like, shape (n,) or (n, d)
    check_psd : bool or None
        Force or skip the eigenvalue positivity check. ``None`` checks
        automatically for n <= 256.

    Raises
    ------
    ValueError
        Empty point list, a diagonal above the kernel bound, or (when
        checked) an eigenvalue below ``-1e-8 * max(diag)``.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if n == 0:
        raise ValueError("cannot build a Gram matrix from an empty point list")
    k = cross_matrix(spec, pts, pts)
    k = 0.5 * (k + k.T)
    bound = kappa_sq(spec, pts)
    max_diag = float(np.max(np.diag(k)))
    if max_diag > bound * (1.0 + 1e-12) + 1e-15:
        raise ValueError(f"Gram diagonal {max_diag} exceeds kernel bound {bound}")
    if check_psd is None:
        check_psd = n <= _AUTO_PSD_LIMIT
    if check_psd:
        min_eig = float(np.linalg.eigvalsh(k)[0])
        if min_eig < -_PSD_TOL * max(max_diag, 1e-300):
            raise ValueError(
                f"Gram matrix is not positive semi-definite: min eigenvalue {min_eig}"
            )
    return GramMatrix(values=k, spec=spec)


def kappa_sq(spec: KernelSpec, points=None) -> float:
    """Upper bound on K(x, x) over the kernel's domain.

    gaussian -> 1, sobolev -> 1/4 (analytic suprema). The linear kernel
    has no domain-wide bound, so the supremum is taken over ``points``,
    which are then required.
    """
    if spec.kind == "gaussian":
        return 1.0
    if spec.kind == "sobolev":
        return 0.25
    if points is None:
        raise ValueError("kappa_sq for the linear kernel needs the point set")
    pts = _as_points(points)
    if pts.ndim == 1:
        return float(np.max(pts**2))
    return float(np.max(np.sum(pts**2, axis=1)))
