import pytest
from hypothesis import given, settings, strategies as st

from exacthearts.linalg import Field, InputError
from exacthearts.quiver import InfiniteDimensionalError, Quiver, build_path_algebra, parse_relation

F5 = Field(5)


def linear(n):
    return Quiver.build([str(i) for i in range(1, n + 1)], [(f"a{i}", str(i + 1), str(i)) for i in range(1, n)])


def test_a2_dimension():
    assert build_path_algebra(linear(2), [], F5).dim == 3


def test_dual_numbers_dimension():
    q = Quiver.build(["1"], [("t", "1", "1")])
    assert build_path_algebra(q, [parse_relation(q, F5, "t.t")], F5).dim == 2


def test_single_vertex():
    assert build_path_algebra(Quiver.build(["1"], []), [], F5).dim == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_linear_path_count(n):
    # paths i -> j for i >= j: n(n+1)/2
    assert build_path_algebra(linear(n), [], F5).dim == n * (n + 1) // 2


def test_commutative_square():
    q = Quiver.build(["1", "2", "3", "4"], [("a", "1", "2"), ("b", "2", "4"), ("c", "1", "3"), ("d", "3", "4")])
    alg = build_path_algebra(q, [parse_relation(q, F5, "a.b - c.d")], F5)
    assert alg.dim == 9
    assert not alg.is_hereditary_certified()


def test_loop_without_relation_is_infinite():
    q = Quiver.build(["1"], [("t", "1", "1")])
    with pytest.raises(InfiniteDimensionalError):
        build_path_algebra(q, [], F5)


def test_bad_inputs():
    with pytest.raises(InputError):
        Quiver.build(["1", "1"], [])
    with pytest.raises(InputError):
        Quiver.build(["1"], [("a", "1", "2")])
    q = linear(2)
    with pytest.raises(InputError):
        parse_relation(q, F5, "b.b")


def test_hereditary_flag():
    assert build_path_algebra(linear(3), [], F5).is_hereditary_certified()


def _truncated_loop(k):
    q = Quiver.build(["1"], [("t", "1", "1")])
    return build_path_algebra(q, [parse_relation(q, F5, ".".join(["t"] * k))], F5)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.data())
def test_truncated_polynomial_multiplication_is_associative(k, data):
    alg = _truncated_loop(k)
    assert alg.dim == k
    basis = list(alg.basis)
    pick = st.sampled_from(basis)
    x, y, z = ({data.draw(pick): 1} for _ in range(3))
    assert alg.multiply(alg.multiply(x, y), z) == alg.multiply(x, alg.multiply(y, z))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.data())
def test_linear_multiplication_is_associative(n, data):
    alg = build_path_algebra(linear(n), [], F5)
    pick = st.sampled_from(list(alg.basis))
    x, y, z = ({data.draw(pick): 1} for _ in range(3))
    assert alg.multiply(alg.multiply(x, y), z) == alg.multiply(x, alg.multiply(y, z))
