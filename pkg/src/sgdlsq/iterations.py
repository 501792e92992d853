"""The three iterative processes: mini-batch SGM, batch GM, population GD.

All three start from the zero element and share the step-size law from
:mod:`sgdlsq.schedules`. Conventions used throughout:

* "Checkpoint t" stores the hypothesis after exactly t gradient steps
  (so checkpoint 1 is the state after the first update). The state
  before any update is the zero element and is not stored.
* Mini-batch indices are sampled i.i.d. uniformly with replacement from
  the whole sample, pre-drawn into an :class:`IndexPlan`, so a run is a
  pure function of its inputs and every rerun is bit-identical.
* A single run is inherently sequential; independent runs (distinct
  plans) share no mutable state and may execute concurrently.

Averaging the mini-batch iterate over many independent index plans
recovers the batch iterate at every step: conditioned on the sample,
the expectation of each sampled gradient is the full-sample gradient,
and the recursion preserves this identity (see
:func:`sgdlsq.decomposition.unbiasedness_check`).
"""

from dataclasses import dataclass

import numpy as np

from .data import Sample
from .errors import DimensionMismatch, DivergenceError
from .rng import make_rng
from .schedules import StepSchedule, passes
from .spaces import AnchorSet, HypothesisVector, euclidean_vector, kernel_vector

_DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True)
class IndexPlan:
    """Pre-drawn mini-batch indices: row t-1 holds the b draws of step t.

    Entries are 0-based positions into the sample. The table is fully
    determined by (m, b, T, seed) through a Philox stream.
    """

    m: int
    b: int
    T: int
    seed: int
    indices: np.ndarray

    def __post_init__(self):
        if self.indices.shape != (self.T, self.b):
            raise DimensionMismatch("index table rows", self.T, self.indices.shape[0])
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= self.m):
            raise ValueError("index plan entries must lie in [0, m)")


def sample_index_plan(m: int, b: int, T: int, seed: int) -> IndexPlan:
    """Draw the T x b table of i.i.d. uniform indices for one run."""
    if not 1 <= b <= m:
        raise ValueError(f"mini-batch size {b} out of range [1, {m}]")
    if T < 1:
        raise ValueError(f"iteration count must be >= 1, got {T}")
    idx = make_rng(seed).integers(0, m, size=(T, b), dtype=np.int64)
    idx.setflags(write=False)
    return IndexPlan(m=m, b=b, T=T, seed=int(seed), indices=idx)


@dataclass(frozen=True)
class Trajectory:
    """Hypotheses recorded at an increasing sequence of step counts."""

    checkpoints: tuple
    vectors: tuple
    passes: tuple
    backend: str

    def __post_init__(self):
        if len(self.checkpoints) != len(self.vectors):
            raise DimensionMismatch(
                "checkpoints vs vectors", len(self.checkpoints), len(self.vectors)
            )
        if any(b >= a for a, b in zip(self.checkpoints[1:], self.checkpoints)):
            raise ValueError("checkpoints must be strictly increasing")

    @property
    def final(self) -> HypothesisVector:
        return self.vectors[-1]

    def vector_at(self, t: int) -> HypothesisVector:
        try:
            return self.vectors[self.checkpoints.index(t)]
        except ValueError:
            raise KeyError(f"no checkpoint at t={t}") from None


def normalize_checkpoints(checkpoints, T: int) -> tuple:
    """Sorted unique checkpoints within [1, T]; default is just (T,)."""
    if checkpoints is None:
        return (int(T),)
    cps = sorted({int(c) for c in checkpoints})
    if not cps:
        raise ValueError("need at least one checkpoint")
    if cps[0] < 1 or cps[-1] > T:
        raise ValueError(f"checkpoints must lie in [1, {T}], got {cps[0]}..{cps[-1]}")
    return tuple(cps)


def log_checkpoints(T: int, count: int = 30) -> tuple:
    """About ``count`` log-spaced step counts from 1 to T inclusive."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    grid = np.unique(np.geomspace(1, T, num=min(count, T)).round().astype(int))
    return tuple(int(v) for v in grid)


def _check_state(w, t, where):
    if not np.all(np.isfinite(w)) or np.max(np.abs(w)) > _DIVERGENCE_LIMIT:
        raise DivergenceError(t, where)


def _as_matrix(x):
    return x[:, None] if x.ndim == 1 else x


def _kernel_ctx(sample: Sample, ctx: AnchorSet) -> np.ndarray:
    if ctx.n != sample.m:
        raise DimensionMismatch("anchor set vs sample", sample.m, ctx.n)
    if not np.array_equal(ctx.points, sample.x):
        raise ValueError("kernel runs anchor the iterate on the sample points; "
                         "the anchor set must be built from sample.x")
    return ctx.gram.values


def run_sgm(
    sample: Sample,
    ctx: AnchorSet | None,
    schedule: StepSchedule,
    plan: IndexPlan,
    checkpoints=None,
) -> Trajectory:
    """Mini-batch stochastic gradient run over a pre-drawn index plan.

    Step t updates with the averaged residual gradient of its b sampled
    points. With ``ctx=None`` the iterate is a coordinate vector over
    ``sample.x``; with an anchor set (built on the sample points) it is
    a kernel expansion and only the b sampled coefficients change per
    step, at O(m b) cost from the gathered Gram rows.
    """
    if plan.m != sample.m:
        raise DimensionMismatch("index plan vs sample", sample.m, plan.m)
    T = plan.T
    cps = normalize_checkpoints(checkpoints, T)
    cp_set = set(cps)
    y = sample.y
    etas = schedule.etas(T)
    out = []
    if ctx is None:
        x = _as_matrix(sample.x)
        w = np.zeros(x.shape[1])
        for t in range(1, T + 1):
            batch = plan.indices[t - 1]
            xb = x[batch]
            resid = xb @ w - y[batch]
            w -= (etas[t - 1] / plan.b) * (xb.T @ resid)
            _check_state(w, t, "sgm/euclidean")
            if t in cp_set:
                out.append(euclidean_vector(w))
    else:
        gram = _kernel_ctx(sample, ctx)
        alpha = np.zeros(sample.m)
        scale = _DIVERGENCE_LIMIT
        for t in range(1, T + 1):
            batch = plan.indices[t - 1]
            resid = gram[batch] @ alpha - y[batch]
            np.subtract.at(alpha, batch, (etas[t - 1] / plan.b) * resid)
            # only the sampled coefficients can change, so checking them
            # keeps the divergence guard O(b)
            touched = alpha[batch]
            if not np.all(np.isfinite(touched)) or np.max(np.abs(touched)) > scale:
                raise DivergenceError(t, "sgm/kernel")
            if t in cp_set:
                out.append(kernel_vector(alpha, ctx))
    return Trajectory(
        checkpoints=cps,
        vectors=tuple(out),
        passes=tuple(passes(plan.b, t, sample.m) for t in cps),
        backend="euclidean" if ctx is None else "kernel",
    )


def run_batch_gm(
    sample: Sample,
    ctx: AnchorSet | None,
    schedule: StepSchedule,
    T: int,
    checkpoints=None,
) -> Trajectory:
    """Deterministic full-gradient run on the empirical risk."""
    if T < 1:
        raise ValueError(f"iteration count must be >= 1, got {T}")
    cps = normalize_checkpoints(checkpoints, T)
    cp_set = set(cps)
    etas = schedule.etas(T)
    out = []
    if ctx is None:
        x = _as_matrix(sample.x)
        w = np.zeros(x.shape[1])
        for t in range(1, T + 1):
            resid = x @ w - sample.y
            w -= (etas[t - 1] / sample.m) * (x.T @ resid)
            _check_state(w, t, "batch/euclidean")
            if t in cp_set:
                out.append(euclidean_vector(w))
    else:
        gram = _kernel_ctx(sample, ctx)
        alpha = np.zeros(sample.m)
        for t in range(1, T + 1):
            alpha -= (etas[t - 1] / sample.m) * (gram @ alpha - sample.y)
            _check_state(alpha, t, "batch/kernel")
            if t in cp_set:
                out.append(kernel_vector(alpha, ctx))
    return Trajectory(
        checkpoints=cps,
        vectors=tuple(out),
        passes=tuple(passes(sample.m, t, sample.m) for t in cps),
        backend="euclidean" if ctx is None else "kernel",
    )


def run_population(
    surrogate,
    f_true,
    schedule: StepSchedule,
    T: int,
    checkpoints=None,
) -> Trajectory:
    """Idealized gradient run against exact targets on a surrogate measure.

    ``surrogate`` is an :class:`AnchorSet` (kernel backend; the iterate
    is an expansion over the surrogate points) or a plain coordinate
    array (euclidean backend). ``f_true`` must be vectorized: it maps
    the surrogate points to their exact target values.
    """
    if T < 1:
        raise ValueError(f"iteration count must be >= 1, got {T}")
    cps = normalize_checkpoints(checkpoints, T)
    cp_set = set(cps)
    etas = schedule.etas(T)
    out = []
    if isinstance(surrogate, AnchorSet):
        pts = surrogate.points
        n = surrogate.n
        f_vals = np.asarray(f_true(pts), dtype=np.float64).reshape(-1)
        if f_vals.shape[0] != n:
            raise DimensionMismatch("f_true values vs surrogate", n, f_vals.shape[0])
        gram = surrogate.gram.values
        coef = np.zeros(n)
        for t in range(1, T + 1):
            coef -= (etas[t - 1] / n) * (gram @ coef - f_vals)
            _check_state(coef, t, "population/kernel")
            if t in cp_set:
                out.append(kernel_vector(coef, surrogate))
        backend = "kernel"
    else:
        raw = np.asarray(surrogate, dtype=np.float64)
        x = _as_matrix(raw)
        n = x.shape[0]
        if n == 0:
            raise ValueError("surrogate point set must be nonempty")
        f_vals = np.asarray(f_true(raw), dtype=np.float64).reshape(-1)
        if f_vals.shape[0] != n:
            raise DimensionMismatch("f_true values vs surrogate", n, f_vals.shape[0])
        mu = np.zeros(x.shape[1])
        for t in range(1, T + 1):
            resid = x @ mu - f_vals
            mu -= (etas[t - 1] / n) * (x.T @ resid)
            _check_state(mu, t, "population/euclidean")
            if t in cp_set:
                out.append(euclidean_vector(mu))
        backend = "euclidean"
    return Trajectory(
        checkpoints=cps,
        vectors=tuple(out),
        passes=cps,  # every step sweeps the whole surrogate once
        backend=backend,
    )
