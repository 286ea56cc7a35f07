import math

import numpy as np
import pytest

import bellforge


def test_paulis():
    x = bellforge.pauli(1)
    assert np.allclose(x, [[0, 1], [1, 0]])
    s4 = bellforge.pauli(4)
    assert np.allclose(s4 @ s4, np.eye(2))


def test_regularize_signs():
    t = np.diag([2.0, -0.5, 0.0]).astype(complex)
    assert np.allclose(bellforge.regularize(t), np.diag([1.0, -1.0, 1.0]))


def test_question_counts():
    assert len(bellforge.question_set(["135"])) == 61
    assert bellforge.base_set_bound(5, 3) == 61


def test_honest_audit():
    rep = bellforge.audit(bellforge.honest_strategy(2), ["13"])
    assert rep["epsilon"] <= 1e-9
    assert all(abs(c["value"] - 6 * math.sqrt(2)) < 1e-9 for c in rep["triple_chsh"])


def test_noisy_audit_epsilon():
    s = bellforge.depolarize(bellforge.honest_strategy(1), 0.05)
    rep = bellforge.audit(s, ["3"])
    assert rep["epsilon"] == pytest.approx(0.6)


def test_isometry_and_prepare():
    s = bellforge.honest_strategy(2)
    iso = bellforge.isometry(s, ["13"], "13")
    assert iso["state_distance"] < 1e-9
    assert iso["junk_weights"][0] == pytest.approx(1.0)
    prep = bellforge.prepare(s, ["13"], "13")
    assert prep["exceed_probability"] == 0.0
    assert all(abs(r["p"] - 0.25) < 1e-9 for r in prep["per_outcome"])


def test_sampled_audit_is_seeded():
    s = bellforge.honest_strategy(1)
    a = bellforge.sampled_audit(s, ["3"], 100, 4)
    b = bellforge.sampled_audit(s, ["3"], 100, 4)
    assert a == b


def test_strategy_json_round_trip():
    s = bellforge.densify(bellforge.honest_strategy(1))
    t = bellforge.strategy_from_json(s.to_json())
    assert t.n == 1
    assert t.to_json() == s.to_json()
