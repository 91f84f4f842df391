"""Software rasterizer for the task foregrounds, plus image file dumps.

Task sprites are drawn opaquely over the background, so the sprite pixel
set is a pure function of the physics state (never of the distractor).
"""

from __future__ import annotations

import numpy as np

from .distractors import _grids
from .physics import Cartpole, PointMass

POINT_MASS_VIEW = 2.5   # world units spanned by the image
CARTPOLE_VIEW = 5.8

BALL_COLOR = (230, 70, 60)
GOAL_COLOR = (70, 200, 90)
CART_COLOR = (90, 120, 220)
POLE_COLOR = (240, 240, 240)
TIP_COLOR = (230, 70, 60)
RAIL_COLOR = (40, 40, 40)


def _disk(yy, xx, cy, cx, r):
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r


def _rect(yy, xx, cy, cx, hh, hw):
    return (np.abs(yy - cy) <= hh) & (np.abs(xx - cx) <= hw)


def _segment(yy, xx, p0, p1, half_width):
    """Pixels within half_width of the segment p0-p1 (all in unit coords)."""
    d = np.array(p1) - np.array(p0)
    L2 = float(d @ d)
    if L2 < 1e-12:
        return _disk(yy, xx, p0[0], p0[1], half_width)
    t = ((yy - p0[0]) * d[0] + (xx - p0[1]) * d[1]) / L2
    t = np.clip(t, 0.0, 1.0)
    py = p0[0] + t * d[0]
    px = p0[1] + t * d[1]
    return (yy - py) ** 2 + (xx - px) ** 2 <= half_width ** 2


def task_layer(task, state: np.ndarray, h: int, w: int):
    """(mask, rgb) of the task sprites; both depend only on the physics."""
    yy, xx = _grids(h, w)
    mask = np.zeros((h, w), dtype=bool)
    rgb = np.zeros((3, h, w), dtype=np.uint8)

    def paint(m, color):
        mask[m] = True
        for c in range(3):
            rgb[c][m] = color[c]

    if isinstance(task, PointMass):
        view = POINT_MASS_VIEW
        # world -> unit image coords (y grows downward)
        gy, gx = 0.5 - task.goal[1] / view, 0.5 + task.goal[0] / view
        by, bx = 0.5 - state[1] / view, 0.5 + state[0] / view
        paint(_disk(yy, xx, gy, gx, 0.05 / 2.5 * (2.5 / view)), GOAL_COLOR)
        paint(_disk(yy, xx, by, bx, 0.10 / view), BALL_COLOR)
    elif isinstance(task, Cartpole):
        view = CARTPOLE_VIEW
        x, _, th, _ = state
        cy = 0.55  # rail sits slightly below center so the pole has headroom
        cx = 0.5 + x / view
        paint(_rect(yy, xx, cy, 0.5, 0.006, 0.5), RAIL_COLOR)
        paint(_rect(yy, xx, cy, cx, 0.09 / view, 0.22 / view), CART_COLOR)
        tip = (cy - task.length * np.cos(th) / view, cx + task.length * np.sin(th) / view)
        paint(_segment(yy, xx, (cy, cx), tip, 0.035 / view), POLE_COLOR)
        paint(_disk(yy, xx, tip[0], tip[1], 0.09 / view), TIP_COLOR)
    else:
        raise TypeError(f"no renderer for task {type(task).__name__}")
    return mask, rgb


def compose(background: np.ndarray, mask: np.ndarray, rgb: np.ndarray) -> np.ndarray:
    frame = background.copy()
    frame[:, mask] = rgb[:, mask]
    return frame


def to_grayscale(frame: np.ndarray) -> np.ndarray:
    lum = 0.299 * frame[0] + 0.587 * frame[1] + 0.114 * frame[2]
    return np.clip(lum, 0, 255).astype(np.uint8)[None, :, :]


def write_pnm(path, frame: np.ndarray):
    """Dump a frame as PPM (3 channels) or PGM (1 channel), binary variants."""
    frame = np.asarray(frame, dtype=np.uint8)
    if frame.ndim != 3 or frame.shape[0] not in (1, 3):
        raise ValueError(f"expected (1|3, H, W) frame, got {frame.shape}")
    _, h, w = frame.shape
    with open(path, "wb") as f:
        if frame.shape[0] == 1:
            f.write(f"P5\n{w} {h}\n255\n".encode())
            f.write(frame[0].tobytes())
        else:
            f.write(f"P6\n{w} {h}\n255\n".encode())
            f.write(frame.transpose(1, 2, 0).tobytes())
