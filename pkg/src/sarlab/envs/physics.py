"""Task dynamics: force-controlled point mass and cartpole swingup.

Both integrate with semi-implicit Euler at a fixed substep dt. States are
plain float64 arrays so they can round-trip through checkpoints.
"""

from __future__ import annotations

import numpy as np


class PointMass:
    """Double integrator in the [-1, 1]^2 arena with linear drag.

    State vector: [px, py, vx, vy]. Reward peaks at the goal (the origin)
    and decays as exp(-k * distance^2), staying in [0, 1] per substep.
    """

    action_dim = 2
    state_dim = 4
    default_action_repeat = 4

    force_gain = 4.0
    drag = 2.0
    reward_k = 8.0
    sparse_radius = 0.15
    goal = np.zeros(2)

    def __init__(self, dt: float = 0.01, sparse: bool = False):
        self.dt = dt
        self.sparse = sparse

    def initial_state(self, rng: np.random.Generator) -> np.ndarray:
        pos = rng.uniform(-0.8, 0.8, size=2)
        return np.array([pos[0], pos[1], 0.0, 0.0])

    def substep(self, state: np.ndarray, action: np.ndarray) -> np.ndarray:
        pos, vel = state[:2], state[2:]
        acc = self.force_gain * action - self.drag * vel
        vel = vel + self.dt * acc
        pos = pos + self.dt * vel
        # walls: clamp position, kill the outward velocity component
        for i in range(2):
            if pos[i] < -1.0:
                pos[i], vel[i] = -1.0, max(vel[i], 0.0)
            elif pos[i] > 1.0:
                pos[i], vel[i] = 1.0, min(vel[i], 0.0)
        return np.concatenate([pos, vel])

    def reward(self, state: np.ndarray) -> float:
        d2 = float(np.sum((state[:2] - self.goal) ** 2))
        r = float(np.exp(-self.reward_k * d2))
        if self.sparse:
            return r if d2 <= self.sparse_radius ** 2 else 0.0
        return r

    def terminated(self, state: np.ndarray) -> bool:
        return False

    def obs_vector(self, state: np.ndarray) -> np.ndarray:
        return state.copy()

    obs_dim = 4


class Cartpole:
    """Frictionless cart with a pendulum bob, swingup task.

    State vector: [x, x_dot, theta, theta_dot], theta measured from upright.
    The pole starts hanging down; episodes terminate when the cart leaves
    |x| <= x_limit. Reward (1 + cos theta)/2 damped toward the rails.
    """

    action_dim = 1
    state_dim = 4
    default_action_repeat = 8

    cart_mass = 1.0
    pole_mass = 0.1
    length = 1.0
    gravity = 9.8
    force_gain = 10.0
    x_limit = 2.5
    sparse_cos = 0.95

    def __init__(self, dt: float = 0.01, sparse: bool = False, cart_damping: float = 1.0):
        self.dt = dt
        self.sparse = sparse
        self.cart_damping = cart_damping  # zero for the conservative-energy mode

    def initial_state(self, rng: np.random.Generator) -> np.ndarray:
        return np.array([
            rng.uniform(-0.1, 0.1),
            0.0,
            np.pi + rng.uniform(-0.05, 0.05),
            0.0,
        ])

    def _accelerations(self, state: np.ndarray, force: float):
        _, x_dot, th, th_dot = state
        mc, mp, l, g = self.cart_mass, self.pole_mass, self.length, self.gravity
        sin_t, cos_t = np.sin(th), np.cos(th)
        denom = mc + mp * sin_t ** 2
        force = force - self.cart_damping * x_dot
        x_acc = (force + mp * sin_t * (l * th_dot ** 2 - g * cos_t)) / denom
        th_acc = (g * sin_t - x_acc * cos_t) / l
        return x_acc, th_acc

    def substep(self, state: np.ndarray, action: np.ndarray) -> np.ndarray:
        force = self.force_gain * float(action[0])
        x_acc, th_acc = self._accelerations(state, force)
        x, x_dot, th, th_dot = state
        x_dot = x_dot + self.dt * x_acc
        th_dot = th_dot + self.dt * th_acc
        x = x + self.dt * x_dot
        th = th + self.dt * th_dot
        return np.array([x, x_dot, th, th_dot])

    def reward(self, state: np.ndarray) -> float:
        x, _, th, _ = state
        upright = (1.0 + np.cos(th)) / 2.0
        centered = max(0.0, 1.0 - abs(x) / self.x_limit)
        if self.sparse:
            return float(upright * centered) if np.cos(th) > self.sparse_cos else 0.0
        return float(upright * centered)

    def terminated(self, state: np.ndarray) -> bool:
        return abs(float(state[0])) > self.x_limit

    def energy(self, state: np.ndarray) -> float:
        """Total mechanical energy; conserved under zero force."""
        _, x_dot, th, th_dot = state
        mc, mp, l, g = self.cart_mass, self.pole_mass, self.length, self.gravity
        kinetic = (0.5 * (mc + mp) * x_dot ** 2
                   + mp * l * x_dot * th_dot * np.cos(th)
                   + 0.5 * mp * l ** 2 * th_dot ** 2)
        potential = mp * g * l * np.cos(th)
        return float(kinetic + potential)

    def obs_vector(self, state: np.ndarray) -> np.ndarray:
        x, x_dot, th, th_dot = state
        return np.array([x, x_dot, np.cos(th), np.sin(th), th_dot])

    obs_dim = 5


TASKS = {"point_mass": PointMass, "cartpole": Cartpole}


def make_task(name: str, dt: float, sparse: bool):
    if name not in TASKS:
        raise ValueError(f"unknown task '{name}' (choose from {sorted(TASKS)})")
    return TASKS[name](dt=dt, sparse=sparse)
