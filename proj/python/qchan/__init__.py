# Copyright 2026 The qchan Authors
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

"""Channel distances, circuit reductions and protocol simulation."""

import json

from ._core import *  # noqa: F401,F403
from ._core import run_suite as _run_suite

__version__ = "0.1.0"


def suite(name, seed=0):
    """Run a property suite; returns (passed, parsed report)."""
    passed, text = _run_suite(name, seed)
    return passed, json.loads(text)
