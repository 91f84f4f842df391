"""Independent oracles used by tests and acceptance runs.

Nothing here touches the autodiff tape's own arithmetic paths: the
characteristic-function evaluations are straight numpy sums, and the
gradient checker perturbs raw parameter values and re-runs the loss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad


@dataclass
class DiscreteSeqDist:
    """Finite distribution over flattened action-sequence vectors."""

    support: np.ndarray      # (n, dim)
    probabilities: np.ndarray  # (n,)

    def __post_init__(self):
        self.support = np.atleast_2d(np.asarray(self.support, dtype=np.float64))
        self.probabilities = np.asarray(self.probabilities, dtype=np.float64)
        if len(self.probabilities) != len(self.support):
            raise ValueError("support and probabilities lengths differ")
        if np.any(self.probabilities < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(self.probabilities.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        idx = rng.choice(len(self.support), size=n, p=self.probabilities)
        return self.support[idx]


def analytic_cf(dist: DiscreteSeqDist, theta) -> tuple[np.ndarray, np.ndarray]:
    """Exact (cos, sin) parts of E[e^{i<theta, x>}] for a finite distribution.

    theta: (dim,) or (m, dim); returns scalars or (m,) arrays.
    """
    theta = np.asarray(theta, dtype=np.float64)
    single = theta.ndim == 1
    th = np.atleast_2d(theta)
    ip = th @ dist.support.T  # (m, n)
    cos_part = np.cos(ip) @ dist.probabilities
    sin_part = np.sin(ip) @ dist.probabilities
    if single:
        return float(cos_part[0]), float(sin_part[0])
    return cos_part, sin_part


def empirical_cf(samples, theta) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo (cos, sin) parts of the characteristic function."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if len(samples) == 0:
        raise ValueError("empirical_cf needs at least one sample")
    theta = np.asarray(theta, dtype=np.float64)
    single = theta.ndim == 1
    th = np.atleast_2d(theta)
    ip = th @ samples.T
    cos_part = np.cos(ip).mean(axis=1)
    sin_part = np.sin(ip).mean(axis=1)
    if single:
        return float(cos_part[0]), float(sin_part[0])
    return cos_part, sin_part


def theta_probe_grid(dim: int, rng: np.random.Generator, n_random: int = 64) -> np.ndarray:
    """Probe frequencies: standard-normal draws plus fixed per-coordinate points."""
    probes = [rng.standard_normal((n_random, dim))]
    for v in (0.0, np.pi / 2, -np.pi / 2, np.pi, -np.pi):
        for k in range(dim):
            row = np.zeros(dim)
            row[k] = v
            probes.append(row[None, :])
    return np.concatenate(probes, axis=0)


def grad_check(loss_fn, params, step: float = 1e-5) -> float:
    """Max relative error between analytic gradients and central differences.

    loss_fn: nullary callable returning a scalar Tensor built from `params`
    (it must be deterministic: any sampling inside must be frozen).
    params: ParamSet or mapping name -> Tensor; all entries must be float64.
    """
    items = list(params.items())
    for name, p in items:
        if p.data.dtype != np.float64:
            raise ValueError(f"grad_check requires float64 parameters ({name} is {p.data.dtype})")
        p.grad = None
    loss = loss_fn()
    ad.backward(loss)
    analytic = {n: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
                for n, p in items}
    worst = 0.0
    for name, p in items:
        flat = p.data.flat  # logical C-order indexing for any memory layout
        for i in range(p.data.size):
            orig = flat[i]
            flat[i] = orig + step
            with ad.no_grad():
                up = float(loss_fn().data)
            flat[i] = orig - step
            with ad.no_grad():
                down = float(loss_fn().data)
            flat[i] = orig
            num = (up - down) / (2.0 * step)
            ana = analytic[name].flat[i]
            err = abs(ana - num) / max(1e-8, abs(ana), abs(num))
            worst = max(worst, err)
    return worst


def variance_floor(theta, action_seqs) -> float:
    """Best-constant-predictor baseline for characteristic-function targets.

    Mean over samples of || e^{i<theta, a>} - mean(e^{i<theta, a>}) ||^2,
    both real and imaginary parts included. The observations and reward
    sequences that accompany the samples do not enter: the floor deliberately
    ignores all conditioning information.
    """
    theta = np.atleast_2d(np.asarray(theta, dtype=np.float64))
    action_seqs = np.atleast_2d(np.asarray(action_seqs, dtype=np.float64))
    if theta.shape != action_seqs.shape:
        raise ValueError(f"theta {theta.shape} and action_seqs {action_seqs.shape} differ")
    ip = np.einsum("nd,nd->n", theta, action_seqs)
    c, s = np.cos(ip), np.sin(ip)
    return float(np.mean((c - c.mean()) ** 2 + (s - s.mean()) ** 2))
