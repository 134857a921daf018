import pytest

from cechdescent import io
from cechdescent.groups import GroupError, GroupTable, cyclic, from_permutations, from_table, symmetric

from helpers import load


def test_symmetric_three():
    K = symmetric(3)
    assert len(K) == 6 and not K.validate()
    assert K.elements[K.identity] == "()"
    assert K.elements == ("()", "(1,2)", "(0,1)", "(0,1,2)", "(0,2,1)", "(0,2)")


def test_composition_is_right_to_left():
    K = symmetric(3)
    a, b = K.index("(0,1)"), K.index("(1,2)")
    # (0 1) after (1 2): 0 -> 0 -> 1, 1 -> 2 -> 2, 2 -> 1 -> 0
    assert K.elements[K.mul(a, b)] == "(0,1,2)"


def test_division_conventions():
    K = symmetric(3)
    for x in range(6):
        for y in range(6):
            assert K.mul(K.div(x, y), y) == x
            assert K.mul(x, K.ldiv(x, y)) == y


def test_corpus_groups():
    assert [len(load(f"z{n}.group")) for n in (2, 3, 4)] == [2, 3, 4]
    s3 = load("s3.group")
    assert s3 == symmetric(3)
    assert io.parse_group(io.format_group(s3)) == s3


def test_bad_tables():
    with pytest.raises(GroupError):
        from_table(["e", "a"], [["e", "a"], ["a", "a"]])
    with pytest.raises(GroupError):
        GroupTable(("e",), ((0, 0),))
    with pytest.raises(io.ParseError):
        io.parse_group("group g\nelements: e a\nmult:\ne a\na x\n")


def test_expansion_cap():
    with pytest.raises(GroupError):
        from_permutations(8, [[[0, 1, 2, 3, 4, 5, 6, 7]], [[0, 1]]])
    assert len(from_permutations(4, [[[0, 1, 2, 3]], [[0, 1]]], cap=24)) == 24


def test_generators_generate():
    for K in (cyclic(4), symmetric(3), cyclic(1)):
        reached, frontier = {K.identity}, [K.identity]
        while frontier:
            frontier = [K.mul(x, g) for x in frontier for g in K.generators
                        if K.mul(x, g) not in reached and not reached.add(K.mul(x, g))]
        assert len(reached) == len(K)
