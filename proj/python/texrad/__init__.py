"""CPU progressive radiosity lightmap baker.

Configs are plain dicts using the keys of the bake report's ``config`` object, for example
``{"width": 64, "height": 64, "mode": "monte_carlo", "window": 4, "passes": 2}``.
"""

import json
import math

from ._core import (
    Bvh,
    Scene,
    TexradError,
    TextureGroup,
    VoxelMap,
    box_scene,
    build_bvh,
    build_texture_group,
    cantor,
    default_epsilon,
    dfpr,
    export_png,
    generate_directions,
    inspect,
    load_scene,
    pair_address,
    read_rtex,
    uv_overlaps,
    voxelize,
    write_rtex,
)
from . import _core

__all__ = [
    "Bvh", "Scene", "TexradError", "TextureGroup", "VoxelMap", "bake", "box_scene", "build_bvh",
    "build_texture_group", "cantor", "classical_solve", "default_epsilon", "dfpr", "error_code", "export_png",
    "generate_directions", "inspect", "load_scene", "pair_address", "read_rtex", "solve", "uv_overlaps",
    "voxelize", "write_rtex",
]


def _value(v):
    # Infinite clamps travel as the string "inf", as in the report files.
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return str(v) if hasattr(v, "__fspath__") else v


def _config_json(config):
    return json.dumps({k: _value(v) for k, v in config.items()}) if config else ""


def solve(scene, config=None, directions=""):
    """Runs config["passes"] passes in memory. Returns (lighting (h, w, 4), list of pass reports)."""
    r = _core.solve(scene, _config_json(config), str(directions))
    return r.lighting, r.reports


def classical_solve(scene, resolution, bounces, config=None):
    """Dense truncated Neumann series over the occupied patches (small lightmaps only)."""
    return _core.classical_solve(scene, resolution, bounces, _config_json(config))


def bake(config):
    """Full pipeline with file output, as the ``bake`` command. Returns (reports, written files)."""
    return _core.bake(_config_json(config))


def error_code(exc):
    """Machine-readable code of a TexradError, e.g. "missing-uv"."""
    return exc.args[0] if exc.args else ""
