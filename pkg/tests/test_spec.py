import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcosamp.errors import RangeError, ValidationError
from qcosamp.spec import (ComponentSpec, ConstantData, Direct, Node, QCoSampSpec, Steerable,
                          balanced_tree, eleven_leaf_tree, encoding_from_json, frequency_index,
                          frequency_value, iter_leaves, load_spec, normalization, phase_index,
                          phase_value, random_tree, single, spec_from_json, spec_to_json,
                          tree_sum, tree_sum_check)

LEAF = ComponentSpec.direct(1, 0.0, 0.0)


@st.composite
def trees(draw, max_leaves=16):
    k = draw(st.integers(1, max_leaves))
    seed = draw(st.integers(0, 2 ** 31))
    return random_tree([LEAF] * k, np.random.default_rng(seed))


@given(trees(64))
def test_leaf_weights_sum_to_one(tree):
    assert tree_sum(tree) == Fraction(1)


def test_eleven_leaf_shape():
    spec = QCoSampSpec(eleven_leaf_tree())
    assert sorted(spec.depths) == [1, 3, 3] + [5] * 8
    assert tree_sum_check(spec)
    assert Fraction(8 * 2, 64) + Fraction(2 * 2, 16) + Fraction(2, 4) == 1


@pytest.mark.parametrize("k,depth", [(1, 0), (2, 1), (4, 2), (8, 3)])
def test_balanced_tree_is_perfect(k, depth):
    spec = QCoSampSpec(balanced_tree([LEAF] * k))
    assert spec.depths == (depth,) * k and spec.balanced


def test_unbalanced_three_leaves():
    spec = QCoSampSpec(balanced_tree([LEAF] * 3))
    assert spec.depths == (2, 2, 1) and not spec.balanced and spec.height == 2


def test_node_needs_two_children():
    with pytest.raises(ValidationError):
        Node(LEAF, None)
    with pytest.raises(ValidationError):
        balanced_tree([])


@pytest.mark.parametrize("bad", [dict(n=-1), dict(n=1.5), dict(r=3.5), dict(s=-4.0)])
def test_component_validation(bad):
    args = dict(n=1, r=0.0, s=0.0) | bad
    with pytest.raises(ValidationError):
        ComponentSpec.direct(args["n"], args["r"], args["s"])


def test_encoding_validation():
    with pytest.raises(ValidationError):
        Steerable(0)
    with pytest.raises(ValidationError):
        ConstantData((1.0, 2.0, 3.0), 1)
    assert ConstantData((1.0,), 2).padded().tolist() == [1.0, 0, 0, 0]


@pytest.mark.parametrize("q", [1, 2, 3, 5])
def test_phase_grid_conventions(q):
    assert phase_value(0, q) == -np.pi
    for k in range(1 << q):
        assert phase_index(phase_value(k, q), q) == k
    with pytest.raises(RangeError):
        phase_index(0.1234, q)


def test_frequency_register_reads_lsb_first():
    # bits "01": first qubit 0 (weight 1), second qubit 1 (weight 2)
    assert frequency_value(0b01, 2) == 2
    assert frequency_value(0b10, 2) == 1
    for n in range(8):
        assert frequency_value(frequency_index(n, 3), 3) == n


def test_normalization_identity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        leaves = [ComponentSpec(Steerable(int(rng.integers(1, 3))), Direct(0.0),
                                Steerable(1)) for _ in range(int(rng.integers(1, 6)))]
        spec = QCoSampSpec(random_tree(leaves, rng), Steerable(int(rng.integers(1, 4))))
        info = normalization(spec)
        for tau, L in zip(info.tau, info.L):
            assert 2 * info.Lambda ** 2 * tau == pytest.approx(1 / L, rel=1e-12)
        assert info.L == tuple(4 * 2 ** d for d in spec.depths)


def test_json_round_trip(tmp_path):
    leaves = [ComponentSpec.direct(2, -0.2, 2.1),
              ComponentSpec(Steerable(2), Steerable(1), Direct(0.5)),
              ComponentSpec(ConstantData((0, 1, 3), 2), Direct(0.1), Direct(-0.1))]
    spec = QCoSampSpec(Node(leaves[0], Node(leaves[1], leaves[2])), ConstantData((0.5, 1.0), 1))
    doc = spec_to_json(spec)
    assert spec_from_json(json.loads(json.dumps(doc))) == spec
    p = tmp_path / "s.json"
    p.write_text(json.dumps(doc))
    assert load_spec(str(p)) == spec


@pytest.mark.parametrize("doc", [
    {},
    {"components": []},
    {"components": [{"n": 1, "r": 0}]},
    {"components": [{"n": 1, "r": 0, "s": 0}], "tree": [0, 0]},
    {"components": [{"n": 1, "r": 0, "s": 0}], "tree": 3},
    {"components": [{"n": {"mode": "weird"}, "r": 0, "s": 0}]},
    {"components": [{"n": True, "r": 0, "s": 0}]},
])
def test_json_schema_errors(doc):
    with pytest.raises(ValidationError):
        spec_from_json(doc)


def test_load_spec_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ValidationError):
        load_spec(str(p))


def test_with_leaves_and_argument():
    spec = single(1, 0.0, 0.0)
    other = spec.with_leaves([ComponentSpec.direct(3, 0.1, 0.2)]).with_argument(Direct(0.5))
    assert other.leaves[0].frequency == Direct(3) and other.argument == Direct(0.5)
    assert [d for _, d in iter_leaves(other.tree)] == [0]
    assert encoding_from_json(0.25, "x") == Direct(0.25)
