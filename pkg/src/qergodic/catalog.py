"""Concrete quantum groups: classical function algebras, group algebras, Kac-Paljutkin.

Function algebras F(G) are built from the Cayley table; group algebras CG are
realized concretely through the block decomposition g |-> (+)_a rho_a(g) given
by a complete table of irreducible unitary representations.  The eight
dimensional Kac-Paljutkin entry is loaded from bundled structure constants
(see data/kac_paljutkin.json) and is validated purely by machine checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .blocks import AlgebraMap, BlockStructure, LinearFunctional, TensorSplit, is_positive
from .groups import FiniteGroup, IrrepTable, irreps_for, is_subgroup
from .hopf import FiniteQuantumGroup, StructuralError
from .walks import WalkState


@dataclass
class ClassicalRealization:
    """Marks a FiniteQuantumGroup as F(G) for a classical group G."""

    group: FiniteGroup
    irreps: IrrepTable | None = None


@dataclass
class DualRealization:
    """Marks a FiniteQuantumGroup as the group algebra CG in block coordinates.

    ``basis`` has column g equal to the coordinates of delta^g, i.e. of
    (+)_a rho_a(g); ``basis_inv`` is its inverse.
    """

    group: FiniteGroup
    irreps: IrrepTable
    basis: np.ndarray
    basis_inv: np.ndarray

    def delta_element(self, structure, g):
        return structure.from_coords(self.basis[:, g])

    def u_values(self, state):
        """The positive-definite-function face of a state: u(s) = nu(delta^s)."""
        return self.basis.T @ state.functional.coeffs


def function_algebra(group):
    """F(G): one 1x1 block per group element, Hopf maps dual to the group maps."""
    n = group.order
    structure = BlockStructure([1] * n)
    split = TensorSplit(structure, structure)
    dk = np.zeros((n * n, n))
    for s in range(n):
        for t in range(n):
            dk[group.mul(s, group.inv(t)) * n + t, s] = 1.0
    comul = AlgebraMap(structure, split.product, dk[split.perm])
    eps = np.zeros(n)
    eps[group.identity] = 1.0
    counit = LinearFunctional(structure, eps)
    smat = np.zeros((n, n))
    for s in range(n):
        smat[group.inv(s), s] = 1.0
    antipode = AlgebraMap(structure, structure, smat)
    try:
        irreps = irreps_for(group)
    except Exception:
        irreps = None
    return FiniteQuantumGroup(
        structure, comul, counit, antipode,
        label=f"F({group.label})",
        realization=ClassicalRealization(group, irreps),
    )


def group_algebra(group, irreps=None):
    """CG, the dual quantum group, in multi-matrix coordinates.

    delta^g is realized as the direct sum of rho_a(g); comultiplication
    delta^g |-> delta^g (x) delta^g, counit delta^g |-> 1 and antipode
    delta^g |-> delta^(g^-1) are transported through that basis change.
    """
    irreps = irreps or irreps_for(group)
    structure = BlockStructure(irreps.dims)
    if structure.dim != group.order:
        raise StructuralError("irrep table is incomplete")
    split = TensorSplit(structure, structure)
    basis = np.column_stack([
        np.concatenate([r.matrices[g].reshape(-1) for r in irreps.irreps])
        for g in range(group.order)
    ])
    basis_inv = np.linalg.inv(basis)
    delta_cols = np.column_stack([
        split.elem(structure.from_coords(basis[:, g]),
                   structure.from_coords(basis[:, g])).coords()
        for g in range(group.order)
    ])
    comul = AlgebraMap(structure, split.product, delta_cols @ basis_inv)
    counit = LinearFunctional(structure, np.linalg.solve(basis.T, np.ones(group.order)))
    smat = basis[:, [group.inv(g) for g in range(group.order)]] @ basis_inv
    antipode = AlgebraMap(structure, structure, smat)
    return FiniteQuantumGroup(
        structure, comul, counit, antipode,
        label=f"C[{group.label}]",
        realization=DualRealization(group, irreps, basis, basis_inv),
    )


def chi_subgroup(dual, subgroup_elems):
    """chi_H = (1/|H|) sum_{h in H} delta^h, a group-like projection in CG."""
    real = dual.realization
    if not isinstance(real, DualRealization):
        raise StructuralError("chi_H lives on a group algebra")
    if not is_subgroup(real.group, subgroup_elems):
        raise ValueError("the given subset is not closed under the group law")
    coords = sum(real.basis[:, h] for h in subgroup_elems) / len(subgroup_elems)
    return dual.structure.from_coords(coords)


# -- states -----------------------------------------------------------------------


def classical_state(fg, spec):
    """A probability on a classical group as a walk state on F(G).

    ``spec`` is ("point", g), ("uniform", iterable of g) or ("weights", map
    g -> probability); elements may be names or indices.  The density is
    f(s) = |G| mu({s}).
    """
    real = fg.realization
    if not isinstance(real, ClassicalRealization):
        raise StructuralError("classical states live on a function algebra")
    group = real.group

    def resolve(g):
        return g if isinstance(g, int) else group.index_of(g)

    kind, payload = spec
    weights = np.zeros(group.order)
    if kind == "point":
        weights[resolve(payload)] = 1.0
    elif kind == "uniform":
        idx = [resolve(g) for g in payload]
        if not idx:
            raise ValueError("uniform state needs a nonempty support")
        weights[idx] = 1.0 / len(idx)
    elif kind == "weights":
        for g, w in payload.items():
            weights[resolve(g)] = float(w)
        if weights.min() < -1e-12:
            raise ValueError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must sum to one")
    else:
        raise ValueError(f"unknown classical state kind {kind!r}")
    density = fg.structure.from_coords(group.order * weights)
    return WalkState(fg, density=density, label=f"{kind}")


def state_from_positive_definite(dual, rho, xi, check_rep=True):
    """State on CG from a unitary representation and a unit vector.

    u(s) = <rho(s) xi, xi> with the inner product conjugate-linear on the
    right; the density is sum_t u(t^-1) delta^t.
    """
    real = dual.realization
    if not isinstance(real, DualRealization):
        raise StructuralError("positive-definite states live on a group algebra")
    group = real.group
    mats = [np.asarray(m, dtype=complex) for m in rho]
    xi = np.asarray(xi, dtype=complex)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-9:
        raise ValueError("xi must be a unit vector")
    if check_rep:
        d = mats[0].shape[0]
        for g in range(group.order):
            if np.abs(mats[g] @ mats[g].conj().T - np.eye(d)).max() > 1e-9:
                raise ValueError("rho is not unitary")
            for h in range(group.order):
                if np.abs(mats[g] @ mats[h] - mats[group.mul(g, h)]).max() > 1e-9:
                    raise ValueError("rho is not a homomorphism")
    values = np.array([np.vdot(xi, mats[g] @ xi) for g in range(group.order)])
    return dual_state_from_values(dual, values)


def dual_state_from_values(dual, values, check=True, label=""):
    """State on CG from the values u(s); density sum_t u(t^-1) delta^t.

    With ``check`` the density is verified positive, i.e. u is verified to be
    a positive-definite function.
    """
    real = dual.realization
    if not isinstance(real, DualRealization):
        raise StructuralError("u-value states live on a group algebra")
    group = real.group
    values = np.asarray(values, dtype=complex)
    density_coords = sum(
        values[group.inv(t)] * real.basis[:, t] for t in range(group.order)
    )
    density = dual.structure.from_coords(density_coords)
    if check and not is_positive(density, 1e-9):
        raise ValueError("the given values are not a positive-definite function")
    return WalkState(dual, density=density, check=check, label=label or "dual state")


def dual_subgroup_state(dual, subgroup_elems):
    """The idempotent state with density chi_H / haar(chi_H)."""
    chi = chi_subgroup(dual, subgroup_elems)
    return WalkState(dual, density=chi * (1.0 / dual.haar(chi).real), label="chi_H state")


def kp_pure_state(kp, block, xi=None):
    """A pure state of the Kac-Paljutkin algebra on one matrix factor.

    For a one-dimensional factor the state is evaluation of that coordinate;
    for the 2x2 factor supply a unit vector xi and get a |-> <a_5 xi, xi>.
    """
    st = kp.structure
    n = st.dims[block]
    coeffs = np.zeros(st.dim, dtype=complex)
    if n == 1:
        coeffs[st.index(block, 0, 0)] = 1.0
    else:
        xi = np.asarray(xi, dtype=complex)
        if xi.shape != (n,) or abs(np.linalg.norm(xi) - 1.0) > 1e-9:
            raise ValueError(f"xi must be a unit vector of length {n}")
        for r in range(n):
            for c in range(n):
                # <E_rc xi, xi> = xi[c] * conj(xi[r])
                coeffs[st.index(block, r, c)] = xi[c] * np.conj(xi[r])
    return WalkState.from_functional_coeffs(kp, coeffs, label=f"pure block {block}")


def bloch_vector(theta, phi):
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


# -- Kac-Paljutkin ------------------------------------------------------------------


def _complex(pair):
    return complex(pair[0], pair[1])


def kac_paljutkin():
    """The eight-dimensional Kac-Paljutkin quantum group.

    Blocks (1,1,1,1,2) with basis eta, e2, e3, e4, E11, E12, E21, E22; the
    comultiplication, counit and antipode coordinates are loaded from
    data/kac_paljutkin.json (format documented there and in the README) and
    validated downstream by the Hopf axiom checker.
    """
    raw = json.loads(
        resources.files("qergodic").joinpath("data/kac_paljutkin.json").read_text()
    )
    dims = raw["block_dims"]
    structure = BlockStructure(dims)
    names = raw["basis"]
    D = structure.dim
    if len(names) != D:
        raise StructuralError("basis names do not match the block dimensions")
    split = TensorSplit(structure, structure)
    dk = np.zeros((D * D, D), dtype=complex)
    eps = np.zeros(D, dtype=complex)
    smat = np.zeros((D, D), dtype=complex)
    for f, name in enumerate(names):
        entry = raw["maps"][name]
        for row in entry["delta"]:
            s, t, pair = row
            dk[s * D + t, f] = _complex(pair)
        eps[f] = _complex(entry["counit"])
        for k, pair in enumerate(entry["antipode"]):
            smat[k, f] = _complex(pair)
    comul = AlgebraMap(structure, split.product, dk[split.perm])
    counit = LinearFunctional(structure, eps)
    antipode = AlgebraMap(structure, structure, smat)
    return FiniteQuantumGroup(structure, comul, counit, antipode, label="Kac-Paljutkin")


# -- catalog roll-call ---------------------------------------------------------------


def catalog_entries(max_cyclic=8, include_kp=True):
    """The standard test roll: F(C2..Cmax), F(S3), C[C2..Cmax], C[S3], Kac-Paljutkin."""
    from .groups import cyclic_group, symmetric_group

    entries = []
    for n in range(2, max_cyclic + 1):
        entries.append(function_algebra(cyclic_group(n)))
    entries.append(function_algebra(symmetric_group(3)))
    for n in range(2, max_cyclic + 1):
        entries.append(group_algebra(cyclic_group(n)))
    entries.append(group_algebra(symmetric_group(3)))
    if include_kp:
        entries.append(kac_paljutkin())
    return entries
