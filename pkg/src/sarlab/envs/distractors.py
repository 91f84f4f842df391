"""Procedurally generated moving-background clips.

Each clip is a seeded motion program: a handful of drifting / oscillating
colored shapes over a low-frequency plane-wave field. A frame is a pure
function of (clip parameters, phase), so there is no hidden simulation
state: re-rendering any phase reproduces the frame exactly. Train and eval
pools draw from disjoint seed streams and disjoint clip-id ranges.
"""

from __future__ import annotations

import numpy as np

EVAL_ID_BASE = 1000

_grid_cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _grids(h: int, w: int):
    if (h, w) not in _grid_cache:
        ys = (np.arange(h) + 0.5) / h
        xs = (np.arange(w) + 0.5) / w
        _grid_cache[(h, w)] = np.meshgrid(ys, xs, indexing="ij")
    return _grid_cache[(h, w)]


class ClipProgram:
    """One background clip: shape tracks plus a drifting interference field."""

    def __init__(self, clip_id: int, seed_seq: np.random.SeedSequence):
        self.clip_id = clip_id
        rng = np.random.default_rng(seed_seq)
        self.base_color = rng.integers(30, 110, size=3).astype(np.float64)
        n_waves = 3
        self.wave_amp = rng.uniform(8.0, 24.0, size=n_waves)
        self.wave_k = rng.uniform(1.0, 3.0, size=(n_waves, 2)) * 2 * np.pi
        self.wave_w = rng.uniform(0.01, 0.06, size=n_waves)
        self.wave_phi = rng.uniform(0, 2 * np.pi, size=n_waves)
        n_shapes = int(rng.integers(3, 7))
        self.kind = rng.integers(0, 3, size=n_shapes)  # 0 disk, 1 square, 2 bar
        self.color = rng.integers(60, 256, size=(n_shapes, 3)).astype(np.float64)
        self.size = rng.uniform(0.08, 0.20, size=n_shapes)
        self.p0 = rng.uniform(0, 1, size=(n_shapes, 2))
        self.vel = rng.uniform(-0.008, 0.008, size=(n_shapes, 2))
        self.osc_amp = rng.uniform(0.0, 0.12, size=n_shapes)
        self.osc_w = rng.uniform(0.01, 0.08, size=n_shapes)
        self.osc_phi = rng.uniform(0, 2 * np.pi, size=n_shapes)
        ang = rng.uniform(0, 2 * np.pi, size=n_shapes)
        self.osc_axis = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        self.bar_angle = rng.uniform(0, np.pi, size=n_shapes)

    def frame(self, phase: int, h: int, w: int) -> np.ndarray:
        """Background frame at the given phase, uint8 (3, h, w)."""
        yy, xx = _grids(h, w)
        field = np.zeros((h, w))
        for a, k, om, ph in zip(self.wave_amp, self.wave_k, self.wave_w, self.wave_phi):
            field += a * np.sin(k[0] * yy + k[1] * xx + om * phase + ph)
        img = self.base_color[:, None, None] + field[None, :, :]
        for i in range(len(self.kind)):
            c = (self.p0[i] + self.vel[i] * phase
                 + self.osc_amp[i] * np.sin(self.osc_w[i] * phase + self.osc_phi[i])
                 * self.osc_axis[i])
            # toroidal offsets keep motion smooth across image edges
            dy = (yy - c[0] + 0.5) % 1.0 - 0.5
            dx = (xx - c[1] + 0.5) % 1.0 - 0.5
            s = self.size[i]
            if self.kind[i] == 0:
                mask = dy * dy + dx * dx <= (s / 2) ** 2
            elif self.kind[i] == 1:
                mask = np.maximum(np.abs(dy), np.abs(dx)) <= s / 2
            else:
                ca, sa = np.cos(self.bar_angle[i]), np.sin(self.bar_angle[i])
                along = dy * ca + dx * sa
                across = -dy * sa + dx * ca
                mask = (np.abs(along) <= s) & (np.abs(across) <= s / 6)
            img[:, mask] = self.color[i][:, None]
        return np.clip(img, 0, 255).astype(np.uint8)


class DistractorPools:
    """Disjoint train / eval clip pools from one dataset seed."""

    def __init__(self, dataset_seed: int, n_train: int = 2, n_eval: int = 30):
        self.n_train = n_train
        self.n_eval = n_eval
        self._clips: dict[int, ClipProgram] = {}
        self._dataset_seed = dataset_seed

    def pool_ids(self, mode: str) -> list[int]:
        if mode == "train":
            return list(range(self.n_train))
        if mode == "eval":
            return [EVAL_ID_BASE + i for i in range(self.n_eval)]
        raise ValueError(f"unknown mode '{mode}' (train or eval)")

    def clip(self, clip_id: int) -> ClipProgram:
        if clip_id not in self._clips:
            if clip_id >= EVAL_ID_BASE:
                key = (self._dataset_seed, 2, clip_id - EVAL_ID_BASE)
            else:
                key = (self._dataset_seed, 1, clip_id)
            self._clips[clip_id] = ClipProgram(clip_id, np.random.SeedSequence(key))
        return self._clips[clip_id]


def background_frame(pools: DistractorPools, clip_id: int, phase: int,
                     h: int, w: int, blank: bool = False) -> np.ndarray:
    if blank:
        return np.full((3, h, w), 128, dtype=np.uint8)
    return pools.clip(clip_id).frame(phase, h, w)
