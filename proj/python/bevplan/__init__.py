# Copyright 2026 The bevplan Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Camera-to-BEV occupancy grids and an LSTM trajectory planner."""

import json as _json

from . import _bevplan
from ._bevplan import (
    BevplanError,
    Scene,
    ade,
    apply_homography,
    connected_components,
    corrupt_mask,
    estimate_homography,
    featurize,
    gaussian_nll,
    ground_plane_homography,
    iou,
    nll_loss,
    presets,
    rasterize_polygons,
    rescale_homography,
    warp_grid,
    warp_mask,
)

__all__ = [
    "BevplanError",
    "Scene",
    "ade",
    "apply_homography",
    "build_dataset",
    "connected_components",
    "corrupt_mask",
    "estimate_homography",
    "evaluate",
    "featurize",
    "gaussian_nll",
    "generate_scene",
    "ground_plane_homography",
    "iou",
    "nll_loss",
    "presets",
    "rasterize_polygons",
    "rescale_homography",
    "train",
    "warp_grid",
    "warp_mask",
]


def _dump(config):
    return "" if config is None else _json.dumps(config)


def generate_scene(seed, config=None):
    """Scene for `seed`; `config` holds scene keys such as duration_s."""
    return Scene.generate(seed, _dump(config))


def build_dataset(n_scenes, ratio, seed, out, config=None):
    return _bevplan.build_dataset(n_scenes, ratio, seed, str(out), _dump(config))


def train(dataset, preset, model_out, seed=0, epochs=-1, config=None):
    return _bevplan.train(str(dataset), preset, str(model_out), seed, epochs, _dump(config))


def evaluate(dataset, model, split="test", seed=0, config=None):
    return _bevplan.evaluate(str(dataset), str(model), split, seed, _dump(config))
