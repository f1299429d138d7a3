"""Regression oracles with known maxima and replayable observation noise.

A model bundles a smooth function f with its maximizer, maximum value, and
the derivatives at the maximizer that the asymptotic constants need.  Noise
is homoskedastic: the observed response at any query point x is
f(x) + disturbance with mean zero and the same variance sigma**2 everywhere.

Randomness is counter-based and keyed.  A one-off observation is a pure
function of (seed, replication, iteration, query index); the trajectory
driver instead consumes a per-replication sequential stream whose draws are
addressed by (iteration, position) through the fixed per-iteration layout.
Both modes derive from the same Philox generator family, so results are
identical across runs, platforms, and any parallel schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

__all__ = [
    "BlumConditionFlags",
    "RegressionModel",
    "NoiseModel",
    "RandomStream",
    "NoiseCursor",
    "observe",
    "make_quadratic",
    "make_cubic_perturbed",
    "model_from_callable",
    "QuadraticForm",
    "CubicQuarticForm",
]


@dataclass(frozen=True)
class BlumConditionFlags:
    """Declared global regularity of f, undecidable from point queries alone.

    ``unique_maximum_separation``: sup of f outside any ball around the
    maximizer stays strictly below the maximum.  ``bounded_hessian``: the
    Hessian is bounded over all of space.  ``gradient_lower_bound``: the
    gradient norm is bounded away from zero outside any ball around the
    maximizer.
    """

    unique_maximum_separation: bool = False
    bounded_hessian: bool = False
    gradient_lower_bound: bool = False


@dataclass(frozen=True)
class QuadraticForm:
    """f(x) = mu - (x - theta)' Q (x - theta) / 2; picklable batched callable."""

    theta: np.ndarray
    mu: float
    q: np.ndarray

    def __call__(self, x: np.ndarray) -> np.ndarray:
        t = x - self.theta
        v = (t[..., None] * self.q).sum(axis=-2)
        return self.mu - 0.5 * (t * v).sum(axis=-1)


@dataclass(frozen=True)
class CubicQuarticForm:
    """f(x) = mu - u**2/2 + beta*u**3 - lam*u**4 with u = x - theta, d = 1."""

    theta: float
    mu: float
    beta: float
    lam: float

    def __call__(self, x: np.ndarray) -> np.ndarray:
        u = x[..., 0] - self.theta
        u2 = u * u
        return self.mu - 0.5 * u2 + self.beta * u2 * u - self.lam * u2 * u2


@dataclass(frozen=True, eq=False)
class RegressionModel:
    dimension: int
    fn: Callable[[np.ndarray], np.ndarray]
    theta_true: np.ndarray
    mu_true: float
    hessian_at_theta: np.ndarray
    third_diag_at_theta: np.ndarray
    a1_flags: BlumConditionFlags

    def f(self, x) -> np.ndarray:
        """Noiseless response at x; accepts any leading batch shape (..., d)."""
        return self.fn(np.asarray(x, dtype=np.float64))

    @property
    def max_hessian_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.hessian_at_theta)[-1])


@dataclass(frozen=True)
class NoiseModel:
    """Homoskedastic disturbance generator: gaussian or centered uniform.

    ``moment_order_m`` declares the largest moment order guaranteed finite;
    it feeds the step-size exponent windows.  The uniform family is bounded
    by sigma*sqrt(3), so any declared order is truthful there.
    """

    sigma: float
    family: str = "gaussian"
    moment_order_m: float = 4.0

    def __post_init__(self) -> None:
        if self.sigma < 0 or not math.isfinite(self.sigma):
            raise ValueError(f"sigma must be a nonnegative real, got {self.sigma!r}")
        if self.family not in ("gaussian", "uniform"):
            raise ValueError(f"noise family must be 'gaussian' or 'uniform', got {self.family!r}")
        if not self.moment_order_m > 2:
            raise ValueError(f"moment order must exceed 2, got {self.moment_order_m!r}")

    def sample(self, rng: Generator, size) -> np.ndarray:
        if self.family == "gaussian":
            return rng.standard_normal(size) * self.sigma
        half = self.sigma * math.sqrt(3.0)
        return rng.uniform(-half, half, size)


@dataclass(frozen=True)
class RandomStream:
    """Keyed source of disturbances for one replication.

    ``keyed_generator(n, q)`` addresses a single draw by its full key and is
    what ``observe`` uses.  ``sequential_generator()`` starts the
    replication's block stream used by the trajectory driver; position
    (iteration, query) maps to a fixed offset once the per-iteration query
    width is set by the run configuration.
    """

    seed: int
    replication: int

    def __post_init__(self) -> None:
        if self.seed < 0 or self.replication < 0:
            raise ValueError("seed and replication index must be nonnegative")

    def keyed_generator(self, n: int, q: int) -> Generator:
        return Generator(Philox(SeedSequence(self.seed, spawn_key=(self.replication, int(n), int(q)))))

    def sequential_generator(self) -> Generator:
        return Generator(Philox(SeedSequence(self.seed, spawn_key=(self.replication,))))


class NoiseCursor:
    """Sequential reader of a replication's disturbance stream."""

    def __init__(self, stream: RandomStream, noise: NoiseModel) -> None:
        self._rng = stream.sequential_generator()
        self._noise = noise

    def draw(self, size) -> np.ndarray:
        return self._noise.sample(self._rng, size)


def observe(
    model: RegressionModel,
    noise: NoiseModel,
    x,
    stream: RandomStream,
    n: int,
    q: int,
) -> float:
    """One noisy response at x, keyed by (stream, n, q); same key, same value."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dimension,):
        raise ValueError(f"query point shape {x.shape} != ({model.dimension},)")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"non-finite query point {x!r}")
    w = noise.sample(stream.keyed_generator(n, q), ())
    return float(model.f(x) + w)


def make_quadratic(dimension: int, q, theta, mu: float) -> RegressionModel:
    """Concave quadratic with maximizer theta and maximum mu; q must be SPD."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (dimension, dimension):
        raise ValueError(f"q must be {dimension}x{dimension}, got {q.shape}")
    if not np.allclose(q, q.T, rtol=1e-12, atol=1e-12):
        raise ValueError("q must be symmetric")
    if np.linalg.eigvalsh(q)[0] <= 0:
        raise ValueError("q must be positive definite")
    theta = np.asarray(theta, dtype=np.float64).reshape(dimension)
    return RegressionModel(
        dimension=dimension,
        fn=QuadraticForm(theta=theta, mu=float(mu), q=q),
        theta_true=theta,
        mu_true=float(mu),
        hessian_at_theta=-q,
        third_diag_at_theta=np.zeros(dimension),
        a1_flags=BlumConditionFlags(True, True, True),
    )


def make_cubic_perturbed(theta: float, mu: float, beta: float, lam: float) -> RegressionModel:
    """One-dimensional quartic-damped cubic: curvature -1 at the maximizer,
    third derivative 6*beta, so the bias constants are nonzero when beta is.

    The constructor verifies on a grid that theta is the unique global
    maximizer and that the gradient does not vanish away from it; lam too
    small relative to beta is rejected.
    """
    theta = float(theta)
    mu = float(mu)
    beta = float(beta)
    lam = float(lam)
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam!r}")
    fn = CubicQuarticForm(theta=theta, mu=mu, beta=beta, lam=lam)

    u = np.arange(-10.0, 10.0 + 1e-4, 1e-4)
    values = fn((theta + u)[:, None])
    u_best = u[int(np.argmax(values))]
    if abs(u_best) > 1e-4:
        raise ValueError(f"grid maximum at offset {u_best:.6f}, not at the declared maximizer")
    grad = -u + 3 * beta * u * u - 4 * lam * u * u * u
    outside = np.abs(u) >= 1e-3
    if np.min(-np.sign(u[outside]) * grad[outside]) <= 0:
        raise ValueError("gradient vanishes or flips sign away from the maximizer; increase lam")

    return RegressionModel(
        dimension=1,
        fn=fn,
        theta_true=np.array([theta]),
        mu_true=mu,
        hessian_at_theta=np.array([[-1.0]]),
        third_diag_at_theta=np.array([6.0 * beta]),
        # quartic tails make the Hessian unbounded, the other two hold
        a1_flags=BlumConditionFlags(True, False, True),
    )


def _fd_steps(theta: np.ndarray, rel_step: float) -> np.ndarray:
    return rel_step * np.maximum(1.0, np.abs(theta))


def finite_difference_hessian(fn, theta: np.ndarray, rel_step: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian of a batched callable at theta."""
    theta = np.asarray(theta, dtype=np.float64)
    d = theta.shape[0]
    h = _fd_steps(theta, rel_step)
    out = np.empty((d, d))
    f0 = float(fn(theta))
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h[i]
        out[i, i] = (float(fn(theta + ei)) - 2 * f0 + float(fn(theta - ei))) / h[i] ** 2
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = h[j]
            out[i, j] = out[j, i] = (
                float(fn(theta + ei + ej))
                - float(fn(theta + ei - ej))
                - float(fn(theta - ei + ej))
                + float(fn(theta - ei - ej))
            ) / (4 * h[i] * h[j])
    return out


def finite_difference_third_diag(fn, theta: np.ndarray, rel_step: float = 1e-4) -> np.ndarray:
    """Central-difference pure third derivatives d^3 f / dx_i^3 at theta."""
    theta = np.asarray(theta, dtype=np.float64)
    d = theta.shape[0]
    h = _fd_steps(theta, rel_step)
    out = np.empty(d)
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h[i]
        out[i] = (
            float(fn(theta + 2 * ei))
            - 2 * float(fn(theta + ei))
            + 2 * float(fn(theta - ei))
            - float(fn(theta + (-2) * ei))
        ) / (2 * h[i] ** 3)
    return out


def model_from_callable(
    fn,
    theta,
    mu: float | None = None,
    flags: BlumConditionFlags | None = None,
    rel_step: float = 1e-4,
) -> RegressionModel:
    """Wrap a user-supplied noiseless batched callable, filling the
    derivatives at the maximizer by central differences."""
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    d = theta.shape[0]
    if mu is None:
        mu = float(fn(theta))
    hess = finite_difference_hessian(fn, theta, rel_step)
    if np.linalg.eigvalsh(hess)[-1] >= 0:
        raise ValueError("the supplied point is not a nondegenerate maximizer (Hessian not negative definite)")
    return RegressionModel(
        dimension=d,
        fn=fn,
        theta_true=theta,
        mu_true=float(mu),
        hessian_at_theta=hess,
        third_diag_at_theta=finite_difference_third_diag(fn, theta, rel_step),
        a1_flags=flags if flags is not None else BlumConditionFlags(),
    )
