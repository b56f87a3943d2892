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

import json
import math
import os
import pathlib

import numpy as np
import pytest

import gnmverify as gv

SOURCE = pathlib.Path(os.environ.get("GNM_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


def klein():
    d = gv.bundled_group("klein")
    return d, d.group, d.subgroup("S")


def test_group_structure():
    d, g, s = klein()
    assert g.order == 4
    assert g.mult("A", "B") == "AB"
    assert g.inverse("AB") == "AB"
    assert s.elements == ["E", "A"]
    assert s.cosets == [["E", "A"], ["B", "AB"]]
    assert set(gv.bundled_group_names()) >= {"klein", "trivial", "c6", "s3", "d4"}
    loaded = gv.load_group(str(SOURCE / "data" / "groups" / "klein.json"))
    assert loaded.group.fingerprint == g.fingerprint


def test_not_a_group():
    with pytest.raises(gv.NotAGroup):
        gv.FiniteGroup.from_table([[0, 1], [1, 1]])
    with pytest.raises(ValueError):
        gv.FiniteGroup.from_table([[0, 1], [1, 1]])


def test_coset_state_and_circuit():
    _, g, s = klein()
    q = gv.coset_proof_state(s, "B")
    assert np.allclose(np.abs(q) ** 2, [0, 0, 0.5, 0.5])
    assert gv.core_circuit_p1(q, g, "A") == pytest.approx(0.0, abs=1e-15)
    assert gv.core_circuit_p1(q, g, "B") == pytest.approx(0.5, abs=1e-15)
    rng = np.random.default_rng(1)
    for _ in range(20):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        for x in ["E", "A", "B", "AB"]:
            assert abs(gv.core_circuit_p1(v, g, x) - gv.core_probability_closed_form(v, g, x)) < 1e-12


def test_exact_and_monte_carlo():
    _, _, s = klein()
    cfg = gv.ProtocolConfig()
    cfg.m = 3
    assert gv.exact_accept_probability({"kind": "honest", "alpha": "B"}, "B", s, cfg) == pytest.approx(0.5, abs=1e-12)
    cfg.m = 2
    assert gv.exact_accept_probability({"kind": "basis", "label": "B"}, "A", s, cfg) == pytest.approx(0.375, abs=1e-12)
    cfg.trials = 20000
    cfg.seed = 42
    est = gv.monte_carlo({"kind": "basis", "label": "B"}, "A", s, cfg)
    assert abs(est["accept_rate"] - 0.375) <= 4 * math.sqrt(0.375 * 0.625 / 20000)
    assert est == gv.monte_carlo({"kind": "basis", "label": "B"}, "A", s, cfg)


def test_optimal_adversary_and_bounds():
    _, _, s = klein()
    cfg = gv.ProtocolConfig()
    for m in range(2, 5):
        cfg.m = m
        lam = gv.optimal_cheat_probability("A", s, cfg)
        assert lam <= min(gv.soundness_bound(m), gv.klein_soundness_bound(m)) + 1e-9
    assert gv.optimal_cheat_probability("E", s, cfg) == 0.0
    assert gv.k_factor(2) == 0.5
    assert gv.gap_optimize(0.496, 0.949)[0] == 14
    m, gap = gv.gap_optimize(0.481, 0.980)
    assert m == 19 and abs(gap - 0.207) <= 1e-3
    assert gv.omax_closed_form(3, 1.0, 1.0) == pytest.approx(3.0)
    assert gv.omax_bruteforce(4, 1.0, 1.0) == pytest.approx(4.0, abs=1e-6)


def test_cli_roundtrip():
    code, out, err = gv.run_cli(["group", "klein"])
    assert code == 0, err
    assert json.loads(out)["order"] == 4
    code, out, _ = gv.run_cli(["group", str(SOURCE / "tests" / "data" / "not_a_group.json")])
    assert code == 2
    code, out, _ = gv.run_cli(["reproduce-experiment", "--format", "json"])
    assert code == 0
    assert [g["m_star"] for g in json.loads(out)["gap"]] == [14, 19]
