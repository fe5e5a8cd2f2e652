import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdpxlab.core import SdpaParseError, SparseSymMatrix, SdpInstance, UnsupportedFormatError
from sdpxlab.relaxations import er_graph, lmi_sdp, maxcut_sdp
from sdpxlab.sdpa import read_sdpa, write_sdpa

from test_verify import prop32

HAND_FIXTURE = """\
* tiny hand-written fixture
1
1
2
1.0
0 1 1 1 1.0
1 1 1 1 1.0
"""


def test_hand_fixture_parses_with_sign_flip():
    inst = read_sdpa(HAND_FIXTURE)
    assert inst.n == 2 and inst.m == 1
    np.testing.assert_array_equal(inst.C, np.diag([-1.0, 0.0]))
    np.testing.assert_array_equal(inst.A[0].to_dense(), np.diag([1.0, 0.0]))
    np.testing.assert_array_equal(inst.b, [1.0])


def test_round_trip_prop32():
    inst = prop32()
    again = read_sdpa(write_sdpa(inst))
    assert inst.n == again.n and inst.m == again.m
    np.testing.assert_array_equal(inst.C, again.C)
    for a, b in zip(inst.A, again.A):
        assert a == b
    np.testing.assert_array_equal(inst.b, again.b)


def test_round_trip_is_bit_exact_on_generated_instances():
    for seed in range(6):
        inst = maxcut_sdp(er_graph(6, 0.5, seed))
        again = read_sdpa(write_sdpa(inst))
        np.testing.assert_array_equal(inst.C, again.C)
        assert all(a == b for a, b in zip(inst.A, again.A))
        np.testing.assert_array_equal(inst.b, again.b)
    inst = lmi_sdp(3, 4, seed=1)
    again = read_sdpa(write_sdpa(inst))
    np.testing.assert_array_equal(inst.C, again.C)
    assert all(a == b for a, b in zip(inst.A, again.A))
    np.testing.assert_array_equal(inst.b, again.b)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 7))
def test_round_trip_random_values(seed, n):
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((n, n)) * rng.choice([1e-6, 1.0, 1e6])
    A = []
    for _ in range(3):
        coords = [(i, j, rng.standard_normal())
                  for i in range(n) for j in range(i, n) if rng.random() < 0.4]
        A.append(SparseSymMatrix.from_coords(n, coords or [(0, 0, 1.0)]))
    inst = SdpInstance(n=n, C=(C + C.T) / 2, A=tuple(A), b=rng.standard_normal(3))
    again = read_sdpa(write_sdpa(inst))
    np.testing.assert_array_equal(inst.C, again.C)
    assert all(a == b for a, b in zip(inst.A, again.A))
    np.testing.assert_array_equal(inst.b, again.b)


def test_multiblock_flattens_to_block_diagonal():
    text = "\n".join([
        "1", "2", "2 1", "3.5",
        "0 1 1 2 1.0",
        "0 2 1 1 2.0",
        "1 1 1 1 1.0",
        "1 2 1 1 -1.0",
    ]) + "\n"
    inst = read_sdpa(text)
    assert inst.n == 3
    expect_C = np.zeros((3, 3))
    expect_C[0, 1] = expect_C[1, 0] = -1.0
    expect_C[2, 2] = -2.0
    np.testing.assert_array_equal(inst.C, expect_C)
    np.testing.assert_array_equal(inst.A[0].to_dense(),
                                  np.diag([1.0, 0.0, -1.0]))


def test_parse_errors_carry_line_numbers():
    bad = HAND_FIXTURE.replace("1 1 1 1 1.0", "1 1 1 oops 1.0")
    with pytest.raises(SdpaParseError) as err:
        read_sdpa(bad)
    assert err.value.line_no == 7
    with pytest.raises(SdpaParseError):
        read_sdpa("2\n1\n2\n1.0\n")  # rhs count mismatch


def test_negative_block_rejected():
    with pytest.raises(UnsupportedFormatError):
        read_sdpa("1\n1\n-3\n1.0\n")


def test_empty_constraint_section_warns():
    text = "1\n1\n2\n1.0\n0 1 1 1 1.0\n"
    with pytest.warns(UserWarning, match="linearly dependent"):
        read_sdpa(text)


def test_comments_ignored_anywhere():
    text = '* leading comment\n"another\n' + write_sdpa(prop32())
    inst = read_sdpa(text)
    assert inst == prop32()
