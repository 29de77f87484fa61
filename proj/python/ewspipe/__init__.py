# Copyright 2026 The ewspipe Authors
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

"""Early-warning dataset generation, preprocessing and evaluation."""

import json as _json

from . import _core
from ._core import (
    Dataset,
    EwsError,
    TimeSeries,
    ewi_score,
    kendall_tau,
    lowess,
    read_dataset,
    roc,
    stratified_split,
    write_dataset,
)

__version__ = _core.__version__


def _cfg(config):
    return "" if not config else _json.dumps(config)


def manifest(dataset):
    """The dataset manifest as a dict."""
    return _json.loads(dataset.manifest_json)


def generate_rapo(n_pairs, seed, config=None, threads=1):
    return _core.generate_rapo(n_pairs, seed, _cfg(config), threads)


def generate_nisir(kinds, n_per_kind, seed, config=None, threads=1):
    if isinstance(kinds, str):
        kinds = [kinds]
    return _core.generate_nisir(list(kinds), n_per_kind, seed, _cfg(config), threads)


def generate_testbed(model, seed, config=None, threads=1):
    return _core.generate_testbed(model, seed, _cfg(config), threads)


def preprocess(dataset, seed, config=None, threads=1):
    return _core.preprocess(dataset, seed, _cfg(config), threads)


def replay(manifest_dict, threads=1):
    return _core.replay(_json.dumps(manifest_dict), threads)


def score(dataset, window_frac=0.5, indicator="variance", span=0.2, threads=1):
    """(id, p_transcritical, eval_start_index) per series."""
    return _core.score(dataset, window_frac, indicator, span, threads)
