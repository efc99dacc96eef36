"""Local-regret accounting, theoretical bound calculators, and the
finite-difference smoothness estimator.

The regret tracked here is the running sum over steps of
||projected grad wrt vec(w)||^2 + ||projected grad wrt vec(u)||^2 for the
windowed loss; a vanishing normalized regret R(t)/t certifies convergence to
locally optimal hidden weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SmoothnessBounds",
    "SmoothnessEstimate",
    "RegretLedger",
    "smoothness_bounds",
    "regret_bound",
    "estimate_smoothness",
]


@dataclass(frozen=True)
class SmoothnessBounds:
    """Worst-case curvature constants of the windowed loss.

    beta_theta bounds the hidden-to-hidden block of the Hessian, beta_mu the
    input block, beta_theta_mu the cross block; beta is their maximum. All
    grow as (1 - lam)^-3, so they explode as the spectral radius approaches 1.
    """

    beta_theta: float
    beta_mu: float
    beta_theta_mu: float
    beta: float


def smoothness_bounds(n_h: int, n_x: int, lam: float) -> SmoothnessBounds:
    """Closed-form curvature bounds for hidden size n_h, input size n_x and
    spectral radius lam in [0, 1)."""
    if n_h < 1 or n_x < 1:
        raise ValueError("n_h and n_x must be >= 1")
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lam must lie in [0, 1), got {lam}")
    denom = (1.0 - lam) ** 3
    beta_theta = 4.0 * n_h * math.sqrt(n_h) / denom
    beta_mu = 4.0 * n_x * math.sqrt(n_h) / denom
    beta_theta_mu = 4.0 * n_h * math.sqrt(n_x) / denom
    return SmoothnessBounds(
        beta_theta=beta_theta,
        beta_mu=beta_mu,
        beta_theta_mu=beta_theta_mu,
        beta=max(beta_theta, beta_mu, beta_theta_mu),
    )


def regret_bound(eta: float, w: int, T: int, n_h: int) -> float:
    """Guaranteed ceiling on the local regret after T steps when the hidden
    learning rate satisfies eta <= 1/beta: (16 sqrt(n_h)/eta) (T/w + 1)."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if w < 1 or T < 1 or n_h < 1:
        raise ValueError("w, T and n_h must be >= 1")
    lead = 16.0 * math.sqrt(n_h) / eta
    return lead * (T / w) + lead


@dataclass(frozen=True)
class SmoothnessEstimate:
    """One finite-difference curvature sample along an update direction.

    A block whose parameters did not move is skipped (None) rather than
    divided by zero; beta_max is the max over the defined blocks, or None
    when both are skipped.
    """

    beta_theta: float | None
    beta_mu: float | None

    @property
    def beta_max(self) -> float | None:
        vals = [v for v in (self.beta_theta, self.beta_mu) if v is not None]
        return max(vals) if vals else None

    @property
    def skipped(self) -> bool:
        return self.beta_theta is None and self.beta_mu is None


def _block_ratio(g0: np.ndarray, g1: np.ndarray, p0: np.ndarray, p1: np.ndarray):
    denom = float(np.linalg.norm(p1 - p0))
    if denom == 0.0:
        return None
    return float(np.linalg.norm(g1 - g0)) / denom


def estimate_smoothness(grad_t, grad_t1, params_t, params_t1) -> SmoothnessEstimate:
    """Curvature of the same windowed loss between two parameter points.

    grad_t and grad_t1 must be gradients of one and the same windowed loss,
    evaluated at params_t and params_t1 (in particular with the same window
    contents and the same output weights).
    """
    return SmoothnessEstimate(
        beta_theta=_block_ratio(grad_t["w"], grad_t1["w"], params_t.w, params_t1.w),
        beta_mu=_block_ratio(grad_t["u"], grad_t1["u"], params_t.u, params_t1.u),
    )


class RegretLedger:
    """Running sums of squared projected-gradient norms, one entry per step.

    Also carries the per-step smoothness samples when the run records them,
    so a single CSV export holds both instrumentation channels. When a run
    samples every k-th step instead of every step, entries are per sample and
    the normalized column divides by the sample count.
    """

    def __init__(self, eta: float, w: int, lam: float, n_h: int, n_x: int):
        self.eta = eta
        self.w = w
        self.lam = lam
        self.n_h = n_h
        self.n_x = n_x
        self.grad_sq_theta: list[float] = []
        self.grad_sq_mu: list[float] = []
        self.regret: list[float] = []  # running sum R(t)
        self.normalized: list[float] = []  # R(t) / t
        self.smoothness: list[SmoothnessEstimate | None] = []

    def __len__(self) -> int:
        return len(self.regret)

    def record_regret(self, projected_grads: dict[str, np.ndarray]) -> "RegretLedger":
        gw = projected_grads["w"]
        gu = projected_grads["u"]
        sq_theta = float(np.sum(gw * gw))
        sq_mu = float(np.sum(gu * gu))
        total = (self.regret[-1] if self.regret else 0.0) + sq_theta + sq_mu
        self.grad_sq_theta.append(sq_theta)
        self.grad_sq_mu.append(sq_mu)
        self.regret.append(total)
        self.normalized.append(total / len(self.regret))
        self.smoothness.append(None)
        return self

    def record_smoothness(self, estimate: SmoothnessEstimate) -> None:
        """Attach a smoothness sample to the most recent step."""
        if not self.smoothness:
            raise ValueError("record a regret entry before its smoothness sample")
        self.smoothness[-1] = estimate

    @property
    def beta_exp(self) -> list[float | None]:
        return [None if e is None else e.beta_max for e in self.smoothness]

    def beta_exp_values(self) -> np.ndarray:
        return np.asarray([b for b in self.beta_exp if b is not None], dtype=np.float64)

    def beta_block_values(self, block: str) -> np.ndarray:
        """Defined per-step samples for one block ('theta' or 'mu')."""
        vals = [
            getattr(e, f"beta_{block}")
            for e in self.smoothness
            if e is not None and getattr(e, f"beta_{block}") is not None
        ]
        return np.asarray(vals, dtype=np.float64)

    def to_csv(self, path) -> None:
        beta = self.beta_exp
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,grad_sq_theta,grad_sq_mu,regret,normalized_regret,beta_exp\n")
            for i in range(len(self.regret)):
                cell = "" if beta[i] is None else repr(beta[i])
                fh.write(
                    f"{i + 1},{self.grad_sq_theta[i]!r},{self.grad_sq_mu[i]!r},"
                    f"{self.regret[i]!r},{self.normalized[i]!r},{cell}\n"
                )
