"""Distracted pixel-control environment: task foreground over moving clips."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distractors import DistractorPools, background_frame
from .physics import make_task
from .rendering import compose, task_layer, to_grayscale, write_pnm


@dataclass
class EnvConfig:
    task: str = "point_mass"
    sparse: bool = False
    obs_mode: str = "pixels"          # "pixels" or "state"
    render_size: int = 84
    frame_stack: int = 3
    grayscale: bool = False
    action_repeat: int = 0            # 0 -> task default (8 cartpole, 4 otherwise)
    episode_horizon: int = 250        # agent steps
    dt: float = 0.01
    train_clips: int = 2
    eval_clips: int = 30
    distractor_seed: int = 1234
    blank_background: bool = False

    def __post_init__(self):
        if self.episode_horizon < 1:
            raise ValueError("episode_horizon must be >= 1")
        if self.obs_mode not in ("pixels", "state"):
            raise ValueError(f"unknown obs_mode '{self.obs_mode}'")


class DistractedEnv:
    """Single-owner environment instance. Call reset() before step().

    Pixel observations are uint8 arrays shaped (frame_stack * channels, H, W)
    with frames ordered oldest to newest; divide by 255 for network input.
    """

    def __init__(self, cfg: EnvConfig):
        self.cfg = cfg
        self.task = make_task(cfg.task, dt=cfg.dt, sparse=cfg.sparse)
        self.action_repeat = cfg.action_repeat or self.task.default_action_repeat
        self.pools = DistractorPools(cfg.distractor_seed, cfg.train_clips, cfg.eval_clips)
        self.channels = 1 if cfg.grayscale else 3
        self._state: np.ndarray | None = None
        self._clip_id = 0
        self._phase = 0
        self._mode = "train"
        self._steps = 0
        self._done = True
        self.last_terminated = False
        self._stack: np.ndarray | None = None

    # observation plumbing -------------------------------------------------
    @property
    def action_dim(self) -> int:
        return self.task.action_dim

    @property
    def obs_shape(self) -> tuple:
        if self.cfg.obs_mode == "state":
            return (self.task.obs_dim,)
        s = self.cfg.render_size
        return (self.cfg.frame_stack * self.channels, s, s)

    @property
    def current_clip_id(self) -> int:
        return self._clip_id

    @property
    def physics_state(self) -> np.ndarray:
        return self._state.copy()

    def _render(self) -> np.ndarray:
        return self.render_frame(self._state, self._clip_id, self._phase)

    def render_frame(self, physics_state, clip_id: int, phase: int) -> np.ndarray:
        """Pure frame render: background first, task sprites composited on top."""
        s = self.cfg.render_size
        bg = background_frame(self.pools, clip_id, phase, s, s,
                              blank=self.cfg.blank_background)
        mask, rgb = task_layer(self.task, np.asarray(physics_state), s, s)
        frame = compose(bg, mask, rgb)
        if self.cfg.grayscale:
            frame = to_grayscale(frame)
        return frame

    def _observation(self) -> np.ndarray:
        if self.cfg.obs_mode == "state":
            return self.task.obs_vector(self._state)
        return self._stack.copy()

    # control ---------------------------------------------------------------
    def reset(self, seed: int, mode: str = "train") -> np.ndarray:
        ids = self.pools.pool_ids(mode)
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), 11 if mode == "train" else 13]))
        self._mode = mode
        self._clip_id = int(ids[rng.integers(len(ids))])
        self._phase = int(rng.integers(0, 10_000))  # clips start mid-stream
        self._state = self.task.initial_state(rng)
        self._steps = 0
        self._done = False
        self.last_terminated = False
        if self.cfg.obs_mode == "pixels":
            first = self._render()
            self._stack = np.concatenate([first] * self.cfg.frame_stack, axis=0)
        return self._observation()

    def step(self, action) -> tuple[np.ndarray, float, bool]:
        if self._done:
            raise RuntimeError("step() after episode end; call reset()")
        a = np.clip(np.asarray(action, dtype=np.float64).reshape(-1), -1.0, 1.0)
        if a.shape != (self.task.action_dim,):
            raise ValueError(f"action shape {a.shape}, expected ({self.task.action_dim},)")
        reward = 0.0
        terminated = False
        for _ in range(self.action_repeat):
            self._state = self.task.substep(self._state, a)
            reward += self.task.reward(self._state)
            self._phase += 1
            if self.task.terminated(self._state):
                terminated = True
                break
        self._steps += 1
        truncated = self._steps >= self.cfg.episode_horizon
        self._done = terminated or truncated
        self.last_terminated = terminated
        if self.cfg.obs_mode == "pixels":
            c = self.channels
            self._stack = np.concatenate([self._stack[c:], self._render()], axis=0)
        return self._observation(), float(reward), self._done

    def dump_frame(self, path):
        write_pnm(path, self._render())

    # checkpoint support ------------------------------------------------------
    def runtime_state(self) -> dict[str, np.ndarray]:
        out = {
            "physics": self._state.astype(np.float64),
            "counters": np.array([
                float(self._clip_id), float(self._phase), float(self._steps),
                float(self._done), float(self.last_terminated),
                1.0 if self._mode == "train" else 0.0,
            ]),
        }
        if self._stack is not None:
            out["stack"] = self._stack.astype(np.float64)
        return out

    def load_runtime_state(self, arrays: dict[str, np.ndarray]):
        self._state = np.asarray(arrays["physics"], dtype=np.float64).copy()
        c = arrays["counters"]
        self._clip_id = int(c[0])
        self._phase = int(c[1])
        self._steps = int(c[2])
        self._done = bool(c[3])
        self.last_terminated = bool(c[4])
        self._mode = "train" if c[5] == 1.0 else "eval"
        if "stack" in arrays:
            self._stack = np.asarray(arrays["stack"]).astype(np.uint8)
