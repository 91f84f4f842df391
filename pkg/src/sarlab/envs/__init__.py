from .distractors import EVAL_ID_BASE, ClipProgram, DistractorPools, background_frame
from .env import DistractedEnv, EnvConfig
from .physics import Cartpole, PointMass, make_task
from .rendering import compose, task_layer, to_grayscale, write_pnm

__all__ = [
    "EVAL_ID_BASE", "ClipProgram", "DistractorPools", "background_frame",
    "DistractedEnv", "EnvConfig", "Cartpole", "PointMass", "make_task",
    "compose", "task_layer", "to_grayscale", "write_pnm",
]
