import itertools

import numpy as np
import pytest

from qergodic.groups import (
    GroupValidationError,
    build_group,
    cyclic_group,
    cyclic_irreps,
    dihedral_group,
    group_from_cayley,
    irreps_for,
    is_normal,
    is_subgroup,
    normal_subgroups,
    s3_irreps,
    s3_standard_integral,
    subgroups,
    symmetric_group,
)


def test_cyclic_basics():
    c2 = cyclic_group(2)
    assert c2.order == 2
    assert c2.inverse == [0, 1]
    c5 = cyclic_group(5)
    assert c5.inverse == [0, 4, 3, 2, 1]


def test_symmetric3_shape():
    s3 = symmetric_group(3)
    assert s3.order == 6
    assert s3.names == ["e", "(12)", "(13)", "(23)", "(123)", "(132)"]
    orders = []
    for g in range(6):
        k, cur = 1, g
        while cur != 0:
            cur = s3.mul(cur, g)
            k += 1
        orders.append(k)
    assert orders.count(2) == 3 and orders.count(3) == 2


def test_symmetric_composition_convention():
    # (123) o (12) = (13) under (a b)(x) = a(b(x))
    s3 = symmetric_group(3)
    assert s3.mul(s3.index_of("(123)"), s3.index_of("(12)")) == s3.index_of("(13)")
    assert s3.mul(s3.index_of("(12)"), s3.index_of("(123)")) == s3.index_of("(23)")


def test_dihedral():
    d4 = dihedral_group(4)
    assert d4.order == 8
    # reflections square to the identity
    for i in range(4, 8):
        assert d4.mul(i, i) == 0


def test_from_cayley_rejects_non_latin():
    with pytest.raises(GroupValidationError):
        group_from_cayley([[0, 0], [1, 1]])
    with pytest.raises(GroupValidationError):
        group_from_cayley([[0, 1], [1, 1]])


def test_from_cayley_rejects_nonassociative():
    # a Latin square (quasigroup) that is not a group: build from a loop of order 5
    table = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupValidationError):
        group_from_cayley(table)


def test_from_cayley_accepts_klein():
    klein = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]
    g = build_group("cayley", table=klein)
    assert g.order == 4
    assert all(g.inv(x) == x for x in range(4))


def _brute_force_subgroups(group):
    found = set()
    for r in range(1, group.order + 1):
        for subset in itertools.combinations(range(group.order), r):
            if is_subgroup(group, subset):
                found.add(subset)
    return sorted(found)


def test_subgroups_s3_against_brute_force():
    s3 = symmetric_group(3)
    subs = subgroups(s3)
    assert len(subs) == 6
    assert subs == _brute_force_subgroups(s3)
    normals = normal_subgroups(s3)
    assert len(normals) == 3
    a3 = tuple(sorted([0, s3.index_of("(123)"), s3.index_of("(132)")]))
    assert a3 in normals


def test_subgroups_c4():
    c4 = cyclic_group(4)
    assert subgroups(c4) == [(0,), (0, 1, 2, 3), (0, 2)]


def test_subgroups_c6_and_d4_counts():
    assert len(subgroups(cyclic_group(6))) == 4
    assert len(subgroups(dihedral_group(4))) == 10


def test_is_normal():
    s3 = symmetric_group(3)
    assert is_normal(s3, [0, s3.index_of("(123)"), s3.index_of("(132)")])
    assert not is_normal(s3, [0, s3.index_of("(12)")])


def test_conjugacy_classes_s3():
    s3 = symmetric_group(3)
    sizes = sorted(len(c) for c in s3.conjugacy_classes())
    assert sizes == [1, 2, 3]


def test_cyclic_irreps_orthogonality():
    c6 = cyclic_group(6)
    table = cyclic_irreps(c6)
    assert table.dims == (1,) * 6


def test_s3_irreps():
    s3 = symmetric_group(3)
    table = s3_irreps(s3)
    assert table.dims == (1, 1, 2)
    std = table.irreps[2]
    # character of the standard representation: 2 at e, 0 at swaps, -1 at 3-cycles
    chi = std.character().real
    assert np.isclose(chi[0], 2) and np.isclose(chi[1], 0) and np.isclose(chi[4], -1)


def test_s3_standard_integral_matches_homomorphism():
    s3 = symmetric_group(3)
    mats = s3_standard_integral(s3)
    for g in range(6):
        for h in range(6):
            assert np.abs(mats[g] @ mats[h] - mats[s3.mul(g, h)]).max() < 1e-12
    assert np.abs(mats[s3.index_of("(12)")] - np.array([[-1, 1], [0, 1]])).max() < 1e-12


def test_irreps_for_unknown_group():
    with pytest.raises(GroupValidationError):
        irreps_for(symmetric_group(4))
