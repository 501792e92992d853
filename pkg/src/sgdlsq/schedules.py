"""Step-size laws, their sanity check, pass counting, and parameter recipes.

The step-size law is eta_t = eta1 * kappa_sq^-1 * t^-theta with
theta in [0, 1), so ``eta1`` is expressed in units of the inverse
input-norm bound. ``validate_schedule`` compares a fixed-step schedule
against the 1 / (8 (ln T + 1)) envelope under which the convergence
analysis operates; it warns rather than rejects, since larger steps can
still converge on easy problems.

``recipe`` instantiates the named (mini-batch size, step law, stopping
iteration) settings that make early stopping rate-optimal for given
regularity ``zeta`` and capacity decay ``gamma``. The proportionality
constant hidden in each "about equal" choice is a single knob ``c_eta``
defaulting to 1/8. Logarithms are natural. The confidence level of the
underlying high-probability statements has no runtime effect and is
intentionally not a parameter.
"""

import math
from dataclasses import dataclass

import numpy as np

from .sums import sum_range

RECIPE_IDS = ("C3", "C4", "C5", "C6", "C7", "BGM", "C11", "C12", "B1", "B2", "B3")

# Recipes that run the deterministic full-gradient iteration instead of
# sampled mini-batches.
BATCH_RECIPE_IDS = ("BGM",)


@dataclass(frozen=True)
class StepSchedule:
    """eta_t = eta1 / kappa_sq * t^-theta for t >= 1."""

    eta1: float
    theta: float = 0.0
    kappa_sq: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.eta1) and self.eta1 > 0):
            raise ValueError(f"eta1 must be positive and finite, got {self.eta1}")
        if not (0.0 <= self.theta < 1.0):
            raise ValueError(f"theta must lie in [0, 1), got {self.theta}")
        if not (np.isfinite(self.kappa_sq) and self.kappa_sq >= 1e-12):
            raise ValueError(f"kappa_sq must be >= 1e-12, got {self.kappa_sq}")

    def eta(self, t: int) -> float:
        if t < 1:
            raise ValueError(f"step index must be >= 1, got {t}")
        return self.eta1 / self.kappa_sq * float(t) ** (-self.theta)

    def etas(self, T: int) -> np.ndarray:
        """Vector (eta_1, ..., eta_T)."""
        t = np.arange(1, T + 1, dtype=np.float64)
        return self.eta1 / self.kappa_sq * t ** (-self.theta)

    def eta_sum(self, lo: int, hi: int) -> float:
        """Compensated sum of eta_t for t in [lo, hi]; 0 when empty."""
        return sum_range(self.eta, lo, hi)


def make_schedule(eta1: float, theta: float = 0.0, kappa_sq: float = 1.0) -> StepSchedule:
    return StepSchedule(eta1=eta1, theta=theta, kappa_sq=kappa_sq)


@dataclass(frozen=True)
class ScheduleCheck:
    ok: bool
    eta1: float
    limit: float
    ratio: float
    message: str


def validate_schedule(schedule: StepSchedule, T: int) -> ScheduleCheck:
    """Advisory check of eta1 against 1 / (8 (ln T + 1)).

    Never rejects; a ratio above 1 means the schedule exceeds the
    envelope assumed by the worst-case analysis.
    """
    if T < 3:
        raise ValueError(f"validation assumes T >= 3, got {T}")
    limit = 1.0 / (8.0 * (math.log(T) + 1.0))
    ratio = schedule.eta1 / limit
    if ratio <= 1.0:
        msg = f"ok: eta1={schedule.eta1:.6g} within limit {limit:.6g}"
        return ScheduleCheck(True, schedule.eta1, limit, ratio, msg)
    msg = (
        f"warning: eta1={schedule.eta1:.6g} exceeds 1/(8(ln T + 1))={limit:.6g} "
        f"(ratio {ratio:.4g}); convergence is not guaranteed in the worst case"
    )
    return ScheduleCheck(False, schedule.eta1, limit, ratio, msg)


def passes(b: int, t: int, m: int) -> int:
    """Data passes consumed after t iterations with mini-batch size b:
    ceil(b t / m), in exact integer arithmetic."""
    if b < 1 or t < 1 or m < 1:
        raise ValueError(f"passes needs b, t, m >= 1, got b={b}, t={t}, m={m}")
    return -((-b * t) // m)


def _ceil_guarded(x: float) -> int:
    """Integer ceiling with a 1e-9 guard against representation error."""
    return max(1, math.ceil(x - 1e-9))


@dataclass(frozen=True)
class Recipe:
    """A (mini-batch size, step schedule, stopping iteration) setting."""

    corollary: str
    b: int
    schedule: StepSchedule
    t_star: int
    m: int
    regime: str

    def __post_init__(self):
        if not (1 <= self.b <= self.m):
            raise ValueError(f"mini-batch size {self.b} out of range [1, {self.m}]")
        if self.t_star < 1:
            raise ValueError(f"t_star must be >= 1, got {self.t_star}")

    @property
    def passes(self) -> int:
        return passes(self.b, self.t_star, self.m)

    @property
    def is_batch(self) -> bool:
        return self.corollary in BATCH_RECIPE_IDS

    def to_json_dict(self) -> dict:
        return {
            "corollary": self.corollary,
            "b": self.b,
            "eta1": self.schedule.eta1,
            "theta": self.schedule.theta,
            "t_star": self.t_star,
            "passes": self.passes,
            "regime": self.regime,
        }


def recipe(
    rid: str,
    m: int,
    zeta: float = 0.5,
    gamma: float = 1.0,
    eps: float | None = None,
    c_eta: float = 0.125,
    kappa_sq: float = 1.0,
) -> Recipe:
    """Instantiate one named parameter recipe for sample size ``m``.

    ``eps`` is only consulted (and then required) by the ids whose
    stopping rule branches at 2*zeta + gamma = 1: BGM, C11, C12 and
    B1..B3. All step laws here are constant in t (theta = 0).
    """
    if rid not in RECIPE_IDS:
        raise ValueError(f"unknown recipe id {rid!r}, expected one of {RECIPE_IDS}")
    if m < 1:
        raise ValueError(f"sample size must be >= 1, got {m}")
    if zeta <= 0:
        raise ValueError(f"zeta must be > 0, got {zeta}")
    if not (0 < gamma <= 1):
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    if c_eta <= 0:
        raise ValueError(f"c_eta must be > 0, got {c_eta}")
    if eps is not None and not (0 < eps < 1):
        raise ValueError(f"eps must lie in (0, 1), got {eps}")

    alpha = 2.0 * zeta + gamma
    log_m = math.log(m)
    if rid in ("C6", "C7", "B2", "B3") and log_m <= 0:
        raise ValueError(f"recipe {rid} needs m >= 2 (its step size scales with 1/ln m)")

    def needs_eps():
        if eps is None:
            raise ValueError(f"recipe {rid}: regime requires epsilon (2*zeta + gamma <= 1)")
        return eps

    mf = float(m)
    if rid == "C3":
        b, eta1 = 1, c_eta / mf
        t_star = _ceil_guarded(mf ** (1.0 + 1.0 / alpha))
    elif rid == "C4":
        b, eta1 = _ceil_guarded(math.sqrt(mf)), c_eta / math.sqrt(mf)
        t_star = _ceil_guarded(mf ** (1.0 / alpha + 0.5))
    elif rid == "C5":
        b, eta1 = 1, c_eta * mf ** (-2.0 * zeta / alpha)
        t_star = _ceil_guarded(mf ** ((2.0 * zeta + 1.0) / alpha))
    elif rid == "C6":
        b, eta1 = _ceil_guarded(mf ** (2.0 * zeta / alpha)), c_eta / log_m
        t_star = _ceil_guarded(mf ** (1.0 / alpha))
    elif rid == "C7":
        b, eta1 = m, c_eta / log_m
        t_star = _ceil_guarded(mf ** (1.0 / alpha))
    elif rid == "BGM":
        b, eta1 = m, c_eta
        t_star = (
            _ceil_guarded(mf ** (1.0 / alpha))
            if alpha > 1
            else _ceil_guarded(mf ** (1.0 - needs_eps()))
        )
    elif rid == "C11":
        b, eta1 = 1, c_eta / mf
        t_star = (
            _ceil_guarded(mf ** (1.0 + 1.0 / alpha))
            if alpha > 1
            else _ceil_guarded(mf ** (2.0 - needs_eps()))
        )
    elif rid == "C12":
        b, eta1 = _ceil_guarded(math.sqrt(mf)), c_eta / math.sqrt(mf)
        t_star = (
            _ceil_guarded(mf ** (1.0 / alpha + 0.5))
            if alpha > 1
            else _ceil_guarded(mf ** (1.5 - needs_eps()))
        )
    elif rid == "B1":
        b, eta1 = 1, c_eta * mf ** (-2.0 * zeta / max(alpha, 1.0))
        t_star = (
            _ceil_guarded(mf ** ((2.0 * zeta + 1.0) / alpha))
            if alpha > 1
            else _ceil_guarded(mf ** (1.0 + 2.0 * zeta - needs_eps()))
        )
    elif rid == "B2":
        b, eta1 = _ceil_guarded(mf ** (2.0 * zeta / max(alpha, 1.0))), c_eta / log_m
        t_star = (
            _ceil_guarded(mf ** (1.0 / alpha))
            if alpha > 1
            else _ceil_guarded(mf ** (1.0 - needs_eps()))
        )
    else:  # B3
        b, eta1 = m, c_eta / log_m
        t_star = (
            _ceil_guarded(mf ** (1.0 / alpha))
            if alpha > 1
            else _ceil_guarded(mf ** (1.0 - needs_eps()))
        )

    regime = "{},{}".format(
        "attainable" if zeta >= 0.5 else "non-attainable",
        "2zeta+gamma>1" if alpha > 1 else "2zeta+gamma<=1",
    )
    sched = StepSchedule(eta1=eta1, theta=0.0, kappa_sq=kappa_sq)
    return Recipe(corollary=rid, b=b, schedule=sched, t_star=t_star, m=m, regime=regime)


def recipe_table(
    m: int,
    zeta: float = 0.5,
    gamma: float = 1.0,
    eps: float | None = None,
    c_eta: float = 0.125,
    ids=RECIPE_IDS,
) -> list[Recipe]:
    """All recipes that are constructible from the given parameters."""
    return [recipe(rid, m, zeta=zeta, gamma=gamma, eps=eps, c_eta=c_eta) for rid in ids]
