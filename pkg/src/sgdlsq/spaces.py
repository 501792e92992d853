"""Hypothesis-space elements over two interchangeable backends.

A hypothesis is either an explicit coordinate vector in R^d
(``euclidean`` backend) or a kernel expansion sum_j alpha_j K(x_j, .)
over a fixed anchor set (``kernel`` backend). Iterates produced by the
gradient methods live in the span of their training points, so kernel
coefficient vectors always have one entry per anchor; population
iterates use the surrogate anchor set instead.

Quantities that compare hypotheses from different anchor sets (for
example a training-set expansion against a surrogate-set expansion) must
be computed through point evaluations, never by subtracting coefficient
vectors; see :mod:`sgdlsq.decomposition`.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BackendMismatch, DimensionMismatch
from .kernels import GramMatrix, KernelSpec, build_gram, cross_matrix

_anchor_counter = itertools.count()


@dataclass(frozen=True)
class AnchorSet:
    """Ordered anchor points plus their Gram matrix.

    ``uid`` distinguishes anchor sets so that coefficients built over
    one set cannot silently be combined with another.
    """

    points: np.ndarray
    kernel: KernelSpec
    gram: GramMatrix
    uid: int = field(default_factory=lambda: next(_anchor_counter))

    def __post_init__(self):
        if self.gram.n != self.n:
            raise DimensionMismatch("anchor set vs Gram matrix", self.n, self.gram.n)
        g = self.gram.values
        scale = max(float(np.max(np.abs(g))), 1e-300)
        if float(np.max(np.abs(g - g.T))) > 1e-12 * scale:
            raise ValueError("Gram matrix is not symmetric within tolerance")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @classmethod
    def build(cls, kernel: KernelSpec, points, check_psd=None) -> "AnchorSet":
        pts = np.array(points, dtype=np.float64)
        gram = build_gram(kernel, pts, check_psd=check_psd)
        pts.setflags(write=False)
        return cls(points=pts, kernel=kernel, gram=gram)


@dataclass(frozen=True)
class HypothesisVector:
    """One element of the hypothesis space.

    ``coeffs`` holds coordinates (euclidean) or expansion coefficients
    (kernel, one per anchor). All entries are finite; the zero vector is
    the zero element exactly.
    """

    backend: str
    coeffs: np.ndarray
    anchors: AnchorSet | None = None

    def __post_init__(self):
        if self.backend not in ("euclidean", "kernel"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("hypothesis coefficients must be finite")
        if self.backend == "kernel":
            if self.anchors is None:
                raise ValueError("kernel backend needs an anchor set")
            if self.coeffs.shape != (self.anchors.n,):
                raise DimensionMismatch(
                    "coefficients vs anchor set", self.anchors.n, self.coeffs.shape[0]
                )
        elif self.anchors is not None:
            raise ValueError("euclidean backend takes no anchor set")


def euclidean_vector(coords) -> HypothesisVector:
    arr = np.array(coords, dtype=np.float64).reshape(-1)
    arr.setflags(write=False)
    return HypothesisVector(backend="euclidean", coeffs=arr)


def kernel_vector(coeffs, anchors: AnchorSet) -> HypothesisVector:
    arr = np.array(coeffs, dtype=np.float64).reshape(-1)
    arr.setflags(write=False)
    return HypothesisVector(backend="kernel", coeffs=arr, anchors=anchors)


def zero_vector(dim=None, anchors=None) -> HypothesisVector:
    if anchors is not None:
        return kernel_vector(np.zeros(anchors.n), anchors)
    if dim is None:
        raise ValueError("need either a dimension or an anchor set")
    return euclidean_vector(np.zeros(int(dim)))


def _check_ctx(h: HypothesisVector, ctx):
    if ctx is None or h.backend != "kernel":
        return
    if isinstance(ctx, AnchorSet) and ctx.uid != h.anchors.uid:
        raise BackendMismatch("hypothesis was built over a different anchor set")


def predict(h: HypothesisVector, xs, ctx=None) -> np.ndarray:
    """Evaluations <h, x>_H at each point of ``xs``; the batch form of
    :func:`evaluate` and the only evaluation path used in hot loops."""
    _check_ctx(h, ctx)
    xs = np.asarray(xs, dtype=np.float64)
    if h.backend == "euclidean":
        d = h.coeffs.shape[0]
        if xs.ndim == 1 and d == 1:
            mat = xs[:, None]
        elif xs.ndim == 2 and xs.shape[1] == d:
            mat = xs
        else:
            got = xs.shape[1] if xs.ndim == 2 else 1
            raise DimensionMismatch("hypothesis vs input point", d, got)
        return mat @ h.coeffs
    k = cross_matrix(h.anchors.kernel, xs, h.anchors.points)
    return k @ h.coeffs


def evaluate(h: HypothesisVector, x, ctx=None) -> float:
    """Inner product <h, x>_H: a dot product (euclidean) or the kernel
    expansion sum_j alpha_j K(x_j, x)."""
    x = np.asarray(x, dtype=np.float64)
    if h.backend == "euclidean":
        d = h.coeffs.shape[0]
        flat = x.reshape(-1)
        if flat.shape[0] != d:
            raise DimensionMismatch("hypothesis vs input point", d, flat.shape[0])
        _check_ctx(h, ctx)
        return float(flat @ h.coeffs)
    pts = x.reshape(1) if x.ndim == 0 else x.reshape(1, -1)
    if h.anchors.points.ndim == 1:
        pts = pts.reshape(-1)
        if pts.shape[0] != 1:
            raise DimensionMismatch("kernel input point", 1, pts.shape[0])
    return float(predict(h, pts, ctx=ctx)[0])


def inner(h1: HypothesisVector, h2: HypothesisVector, ctx=None) -> float:
    """H-inner product. Kernel backend: alpha^T K beta over the shared
    anchor set; mixing backends or anchor sets is an error."""
    if h1.backend != h2.backend:
        raise BackendMismatch(f"cannot mix backends {h1.backend!r} and {h2.backend!r}")
    if h1.backend == "euclidean":
        if h1.coeffs.shape != h2.coeffs.shape:
            raise DimensionMismatch("inner product operands", h1.coeffs.shape[0], h2.coeffs.shape[0])
        return float(h1.coeffs @ h2.coeffs)
    if h1.anchors.uid != h2.anchors.uid:
        raise BackendMismatch("inner product needs a shared anchor set")
    _check_ctx(h1, ctx)
    return float(h1.coeffs @ (h1.anchors.gram.values @ h2.coeffs))


def norm_sq(h: HypothesisVector) -> float:
    """Squared H-norm, clipped at zero against roundoff."""
    return max(inner(h, h), 0.0)


def mean_square_error(h: HypothesisVector, points, targets, ctx=None) -> float:
    """Mean of squared residuals (<h, x_i> - y_i)^2 over a point set."""
    points = np.asarray(points, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    n_pts = points.shape[0]
    if n_pts == 0:
        raise ValueError("mean_square_error needs at least one point")
    if n_pts != targets.shape[0]:
        raise DimensionMismatch("points vs targets", n_pts, targets.shape[0])
    resid = predict(h, points, ctx=ctx) - targets
    return float(np.mean(resid**2))
