"""Finite classical groups: Cayley tables, subgroup enumeration, irreducible representations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


class GroupValidationError(ValueError):
    """The supplied data does not describe a group."""


class FiniteGroup:
    """A finite group as an index set 0..order-1 with a Cayley table.

    Element 0 is always the identity.  ``names`` carry display labels
    (cycle notation for symmetric groups, residues for cyclic ones).
    For permutation-built groups ``perms[i]`` stores the underlying
    permutation tuple; it is None otherwise.
    """

    def __init__(self, names, cayley, label="", perms=None):
        self.names = list(names)
        self.order = len(self.names)
        self.cayley = np.array(cayley, dtype=int)
        self.label = label or f"group of order {self.order}"
        self.perms = list(perms) if perms is not None else None
        self._validate()
        self.identity = 0
        self.inverse = [int(np.where(self.cayley[g] == 0)[0][0]) for g in range(self.order)]
        self._index = {name: i for i, name in enumerate(self.names)}

    def _validate(self):
        n = self.order
        if self.cayley.shape != (n, n):
            raise GroupValidationError("Cayley table shape does not match the element count")
        if self.cayley.min() < 0 or self.cayley.max() >= n:
            raise GroupValidationError("Cayley table entries out of range")
        for g in range(n):
            if sorted(self.cayley[g]) != list(range(n)) or sorted(self.cayley[:, g]) != list(range(n)):
                raise GroupValidationError("Cayley table is not a Latin square")
        if any(self.cayley[0, g] != g or self.cayley[g, 0] != g for g in range(n)):
            raise GroupValidationError("element 0 does not act as the identity")
        for a in range(n):
            for b in range(n):
                ab = self.cayley[a, b]
                for c in range(n):
                    if self.cayley[ab, c] != self.cayley[a, self.cayley[b, c]]:
                        raise GroupValidationError("Cayley table is not associative")
        for g in range(n):
            if not np.any(self.cayley[g] == 0):
                raise GroupValidationError("an element has no inverse")

    def mul(self, a, b):
        return int(self.cayley[a, b])

    def inv(self, a):
        return self.inverse[a]

    def index_of(self, name):
        if name not in self._index:
            raise KeyError(f"unknown element {name!r} of {self.label}")
        return self._index[name]

    def conjugacy_classes(self):
        seen = set()
        classes = []
        for g in range(self.order):
            if g in seen:
                continue
            orbit = {self.mul(self.mul(h, g), self.inv(h)) for h in range(self.order)}
            seen |= orbit
            classes.append(sorted(orbit))
        return classes

    def __repr__(self):
        return f"FiniteGroup({self.label!r}, order={self.order})"


# -- constructors ---------------------------------------------------------------


def cyclic_group(n):
    if n < 1:
        raise GroupValidationError("cyclic order must be >= 1")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup([str(i) for i in range(n)], table, label=f"C{n}")


def _cycle_notation(perm):
    n = len(perm)
    seen = [False] * n
    parts = []
    for start in range(n):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen[nxt] = True
            nxt = perm[nxt]
        parts.append("(" + "".join(str(x + 1) for x in cyc) + ")")
    return "".join(parts) if parts else "e"


def symmetric_group(n):
    """S_n by permutation composition; elements named in cycle notation.

    Bounded at n <= 4: larger orders are outside this artifact's scope.
    """
    if not 1 <= n <= 4:
        raise GroupValidationError("symmetric groups are supported for 1 <= n <= 4")
    perms = list(itertools.permutations(range(n)))
    support = lambda p: sum(1 for i, x in enumerate(p) if x != i)
    perms.sort(key=lambda p: (support(p), _cycle_notation(p)))
    index = {p: i for i, p in enumerate(perms)}
    # composition convention: (a b)(x) = a(b(x))
    table = [
        [index[tuple(a[b[x]] for x in range(n))] for b in perms]
        for a in perms
    ]
    names = [_cycle_notation(p) for p in perms]
    return FiniteGroup(names, table, label=f"S{n}", perms=perms)


def dihedral_group(n):
    """D_n of order 2n: rotations r0..r{n-1} and reflections s0..s{n-1}."""
    if n < 1:
        raise GroupValidationError("dihedral parameter must be >= 1")
    names = [f"r{i}" for i in range(n)] + [f"s{i}" for i in range(n)]
    table = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            table[i][j] = (i + j) % n
            table[i][j + n] = (i + j) % n + n
            table[i + n][j] = (i - j) % n + n
            table[i + n][j + n] = (i - j) % n
    return FiniteGroup(names, table, label=f"D{n}")


def group_from_cayley(table, names=None, label=""):
    table = np.asarray(table, dtype=int)
    if names is None:
        names = [str(i) for i in range(table.shape[0])]
    return FiniteGroup(names, table, label=label or "custom")


def build_group(family, n=None, table=None):
    """Catalog front door: cyclic(n), symmetric(n), dihedral(n) or an explicit table."""
    if family == "cyclic":
        return cyclic_group(n)
    if family == "symmetric":
        return symmetric_group(n)
    if family == "dihedral":
        return dihedral_group(n)
    if family == "cayley":
        return group_from_cayley(table)
    raise GroupValidationError(f"unknown group family {family!r}")


# -- subgroups --------------------------------------------------------------------


def _closure(group, seed):
    out = set(seed) | {0}
    frontier = list(out)
    while frontier:
        fresh = []
        for a in list(out):
            for b in frontier:
                for c in (group.mul(a, b), group.mul(b, a)):
                    if c not in out:
                        out.add(c)
                        fresh.append(c)
        frontier = fresh
    return frozenset(out)


def subgroups(group):
    """All subgroups, as sorted index tuples.

    Brute force: close every <=2-generator subset, then close the collection
    under pairwise joins until stable.  Bounded at order 64.
    """
    if group.order > 64:
        raise GroupValidationError("subgroup enumeration is bounded at order 64")
    found = {frozenset({0})}
    for g in range(group.order):
        found.add(_closure(group, {g}))
    for g in range(group.order):
        for h in range(g + 1, group.order):
            found.add(_closure(group, {g, h}))
    while True:
        fresh = set()
        for a in found:
            for b in found:
                j = _closure(group, a | b)
                if j not in found:
                    fresh.add(j)
        if not fresh:
            break
        found |= fresh
    return sorted(tuple(sorted(h)) for h in found)


def is_normal(group, subgroup_elems):
    h_set = set(subgroup_elems)
    for g in range(group.order):
        gi = group.inv(g)
        for h in h_set:
            if group.mul(group.mul(g, h), gi) not in h_set:
                return False
    return True


def normal_subgroups(group):
    return [h for h in subgroups(group) if is_normal(group, h)]


def is_subgroup(group, elems):
    s = set(elems)
    if 0 not in s:
        return False
    return all(group.mul(a, b) in s for a in s for b in s)


# -- irreducible representations ---------------------------------------------------


@dataclass
class Irrep:
    name: str
    dim: int
    matrices: list  # one unitary dim x dim array per group element

    def character(self):
        return np.array([m.trace() for m in self.matrices])


class IrrepTable:
    """A complete list of irreducible unitary representations of a finite group."""

    def __init__(self, group, irreps):
        self.group = group
        self.irreps = list(irreps)
        self.validate()

    def validate(self, tol=1e-10):
        n = self.group.order
        if sum(r.dim ** 2 for r in self.irreps) != n:
            raise GroupValidationError("irrep dimensions do not sum to the group order")
        for r in self.irreps:
            for g in range(n):
                m = r.matrices[g]
                if np.abs(m @ m.conj().T - np.eye(r.dim)).max() > tol:
                    raise GroupValidationError(f"irrep {r.name} is not unitary at {g}")
                for h in range(n):
                    if np.abs(r.matrices[g] @ r.matrices[h]
                              - r.matrices[self.group.mul(g, h)]).max() > tol:
                        raise GroupValidationError(f"irrep {r.name} is not a homomorphism")
        chars = [r.character() for r in self.irreps]
        for a, ca in enumerate(chars):
            for b, cb in enumerate(chars):
                ip = (ca * cb.conj()).sum() / n
                if abs(ip - (1.0 if a == b else 0.0)) > 1e-9:
                    raise GroupValidationError("character orthogonality fails")

    @property
    def dims(self):
        return tuple(r.dim for r in self.irreps)


def cyclic_irreps(group):
    """Characters k |-> omega**(j*k) of a cyclic group built by cyclic_group()."""
    n = group.order
    omega = np.exp(2j * np.pi / n)
    irreps = [
        Irrep(f"chi{j}", 1, [np.array([[omega ** (j * g)]]) for g in range(n)])
        for j in range(n)
    ]
    return IrrepTable(group, irreps)


def s3_irreps(group):
    """Trivial, sign, and the standard representation of S3.

    The standard representation is the permutation action restricted to the
    sum-zero plane, written in the orthonormal basis
    (1,-1,0)/sqrt(2), (1,1,-2)/sqrt(6).
    """
    if group.perms is None or group.order != 6:
        raise GroupValidationError("expected the symmetric group S3")
    basis = np.array([
        [1 / np.sqrt(2), -1 / np.sqrt(2), 0],
        [1 / np.sqrt(6), 1 / np.sqrt(6), -2 / np.sqrt(6)],
    ])
    trivial, sign, standard = [], [], []
    for p in group.perms:
        pm = np.zeros((3, 3))
        for i in range(3):
            pm[p[i], i] = 1.0  # permutation matrix: e_i -> e_{p(i)}
        parity = np.linalg.det(pm)
        trivial.append(np.array([[1.0 + 0j]]))
        sign.append(np.array([[parity + 0j]]))
        standard.append((basis @ pm @ basis.T).astype(complex))
    return IrrepTable(group, [
        Irrep("trivial", 1, trivial),
        Irrep("sign", 1, sign),
        Irrep("standard", 2, standard),
    ])


def s3_standard_integral(group):
    """The integer (non-unitary) form of the standard representation of S3.

    Generated by (12) |-> [[-1, 1], [0, 1]] and (123) |-> [[0, -1], [1, -1]];
    GL(2, Z)-valued, so not usable in an IrrepTable, but needed to rebuild
    pure-state coefficient sets quoted in that form.
    """
    if group.perms is None or group.order != 6:
        raise GroupValidationError("expected the symmetric group S3")
    gen = {
        "(12)": np.array([[-1.0, 1.0], [0.0, 1.0]]),
        "(123)": np.array([[0.0, -1.0], [1.0, -1.0]]),
    }
    e = group.index_of("e")
    mats = {e: np.eye(2)}
    frontier = [e]
    gen_idx = {group.index_of(k): v for k, v in gen.items()}
    while frontier:
        nxt = []
        for g in frontier:
            for gi, gm in gen_idx.items():
                h = group.mul(gi, g)
                if h not in mats:
                    mats[h] = gm @ mats[g]
                    nxt.append(h)
        frontier = nxt
    return [mats[g] for g in range(group.order)]


def irreps_for(group):
    """The bundled irrep table for a catalog group, if there is one."""
    if group.label.startswith("C") and group.perms is None and group.label[1:].isdigit():
        return cyclic_irreps(group)
    if group.label == "S3":
        return s3_irreps(group)
    raise GroupValidationError(
        f"no bundled irreducible representations for {group.label}; supply a table"
    )
