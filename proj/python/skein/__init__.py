# Copyright 2026 The Skein Authors
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

"""Exact and sketched softmax attention backed by the skein C++ library."""

from ._core import (
    SkeinError,
    exact_attention,
    flops_estimate,
    informer_attention,
    linformer_attention,
    skein_attention,
    spectral_norm,
    vmean_attention,
)

__all__ = [
    "SkeinError",
    "exact_attention",
    "flops_estimate",
    "informer_attention",
    "linformer_attention",
    "skein_attention",
    "spectral_norm",
    "vmean_attention",
]
