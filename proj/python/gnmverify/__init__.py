# Copyright 2026 The gnmverify Authors
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

"""Exact simulation of the shallow-circuit group non-membership protocol."""

import json as _json

from gnmverify._core import *  # noqa: F401,F403
from gnmverify._core import (
    __version__,
    _exact_accept_probability,
    _monte_carlo,
)


def exact_accept_probability(strategy, g, subgroup, config):
    """Strategy is a dict such as {"kind": "honest", "alpha": "B"}."""
    return _exact_accept_probability(_json.dumps(strategy), g, subgroup, config)


def monte_carlo(strategy, g, subgroup, config):
    return _monte_carlo(_json.dumps(strategy), g, subgroup, config)
