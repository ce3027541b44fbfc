"""Finite quantum groups as multi-matrix C*-Hopf algebras.

A :class:`FiniteQuantumGroup` bundles a block structure with its
comultiplication, counit and antipode, and computes the Haar state (by a
linear solve, never from a closed form) and the Haar element at construction
time.  Axiom verification, group-like projection machinery and the
convolution product on the algebra live here as well.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .blocks import (
    BlockStructure,
    DomainError,
    LinearFunctional,
    TensorSplit,
    is_projection,
)

GROUP_LIKE_TOL = 1e-8
_REFINE_TOL = 1e-12


class StructuralError(RuntimeError):
    """The given structure maps do not describe a finite quantum group."""


class UnsupportedError(RuntimeError):
    """The operation is outside the documented limits of this implementation."""


@dataclass
class HopfAxiomReport:
    """Named residuals from the Hopf axiom checks (aggregate Frobenius norms)."""

    residuals: dict = field(default_factory=dict)

    @property
    def max_residual(self):
        return max(self.residuals.values())

    def passed(self, tol):
        return self.max_residual <= tol

    def __str__(self):
        lines = [f"  {name:22s} {value:.3e}" for name, value in self.residuals.items()]
        return "\n".join(lines)


class FiniteQuantumGroup:
    """Block structure plus comultiplication, counit, antipode; Haar data cached.

    Immutable after construction.  ``realization`` optionally records how the
    entry was built (classical function algebra, group algebra, ...) so that
    criteria needing that extra data can find it.
    """

    def __init__(self, structure, comul, counit, antipode, label="",
                 realization=None, validate=True):
        if not isinstance(structure, BlockStructure):
            structure = BlockStructure(structure)
        self.structure = structure
        self.split = TensorSplit(structure, structure)
        if comul.domain != structure or comul.codomain != self.split.product:
            raise StructuralError("comultiplication shape does not match the algebra")
        if counit.structure != structure:
            raise StructuralError("counit shape does not match the algebra")
        if antipode.domain != structure or antipode.codomain != structure:
            raise StructuralError("antipode shape does not match the algebra")
        self.comul = comul
        self.counit = counit
        self.antipode = antipode
        self.label = label or f"quantum group on {structure.dims}"
        self.realization = realization
        self.unit = structure.unit()
        # comultiplication with output rows in Kronecker order
        self.comul_kron = comul.matrix[self.split.inv_perm]
        self._haar_data = None
        self._haar_element = None
        if validate:
            # fill the Haar caches now so instances can be shared freely
            self._haar_data = self._solve_haar()
            self._haar_element = self._find_haar_element()

    @property
    def haar(self):
        if self._haar_data is None:
            self._haar_data = self._solve_haar()
        return self._haar_data[0]

    @property
    def haar_weights(self):
        if self._haar_data is None:
            self._haar_data = self._solve_haar()
        return self._haar_data[1]

    @property
    def haar_element(self):
        if self._haar_element is None:
            self._haar_element = self._find_haar_element()
        return self._haar_element

    # -- basic derived data -------------------------------------------------

    @property
    def dim(self):
        return self.structure.dim

    def delta(self, a):
        """Comultiplication, landing in the product structure."""
        return self.comul(a)

    def delta_kron(self, a):
        """Comultiplication of ``a`` as a (D, D) array in Kronecker order."""
        D = self.dim
        return (self.comul_kron @ a.coords()).reshape(D, D)

    # -- Haar state ----------------------------------------------------------

    def _solve_haar(self):
        """Solve the left-invariance system (h (x) id) Delta(f) = h(f) 1 for h.

        Asserts the solution space is one-dimensional, then validates
        traciality and faithfulness of the normalized solution.
        """
        D = self.dim
        unit = self.unit.coords()
        rows = []
        for f in range(D):
            W = self.comul_kron[:, f].reshape(D, D)
            E = W.T.copy()
            E[:, f] -= unit
            rows.append(E)
        system = np.vstack(rows)
        _, sing, vh = np.linalg.svd(system)
        null_count = int(np.sum(sing <= 1e-10 * max(1.0, sing[0])))
        if null_count != 1:
            raise StructuralError(
                f"invariance system has a {null_count}-dimensional solution space; "
                "the structure maps do not define a quantum group"
            )
        coeffs = vh[-1].conj()
        coeffs = coeffs / (coeffs @ unit)
        # tracial and faithful <=> each block of coefficients is w_i * I with w_i > 0
        weights = []
        for i, n in enumerate(self.structure.dims):
            seg = coeffs[self.structure.offsets[i]:self.structure.offsets[i + 1]].reshape(n, n)
            w = seg.trace() / n
            if abs(w.imag) > 1e-9 or w.real <= 1e-12:
                raise StructuralError("Haar state is not faithful and positive")
            if np.abs(seg - w * np.eye(n)).max() > 1e-9:
                raise StructuralError("Haar state is not tracial")
            weights.append(float(w.real))
        coeffs = np.concatenate(
            [w * np.eye(n).reshape(-1) for w, n in zip(weights, self.structure.dims)]
        )
        haar = LinearFunctional(self.structure, coeffs)
        # right invariance and antipode invariance are theorems; treat failures as structural
        for f in range(D):
            W = self.comul_kron[:, f].reshape(D, D)
            lhs = W @ coeffs
            if np.abs(lhs - coeffs[f] * unit).max() > 1e-9:
                raise StructuralError("Haar state is not right invariant")
        if np.abs(self.antipode.matrix.T @ coeffs - coeffs).max() > 1e-9:
            raise StructuralError("Haar state is not antipode invariant")
        return haar, tuple(weights)

    def _find_haar_element(self):
        """The minimal central projection spanning the counit's one-dimensional factor."""
        hits = []
        for i, n in enumerate(self.structure.dims):
            if n != 1:
                continue
            z = self.structure.basis_element(self.structure.index(i, 0, 0))
            if abs(self.counit(z) - 1.0) <= 1e-9:
                hits.append(z)
        if len(hits) != 1:
            raise StructuralError(
                f"found {len(hits)} one-dimensional factors with counit value 1, expected 1"
            )
        return hits[0]

    # -- axiom verification ----------------------------------------------------

    def verify_axioms(self):
        """Residuals of the defining identities, as aggregate Frobenius norms.

        Covers coassociativity, both counital laws, both antipodal laws,
        the *-homomorphism property of the comultiplication on the full
        coordinate basis, and involutivity of the antipode.
        """
        D = self.dim
        dk = self.comul_kron
        ceps = self.counit.coeffs
        smat = self.antipode.matrix
        unit = self.unit.coords()
        mult = self.structure.mult_table
        star = self.structure.star_perm

        sq = {name: 0.0 for name in (
            "coassociativity", "counit_left", "counit_right",
            "antipode_left", "antipode_right", "comul_star", "comul_multiplicative",
        )}
        for f in range(D):
            W = dk[:, f].reshape(D, D)
            coassoc = (dk @ W).reshape(-1) - (W @ dk.T).reshape(-1)
            sq["coassociativity"] += float((np.abs(coassoc) ** 2).sum())
            basis_f = np.zeros(D)
            basis_f[f] = 1.0
            sq["counit_left"] += float((np.abs(ceps @ W - basis_f) ** 2).sum())
            sq["counit_right"] += float((np.abs(W @ ceps - basis_f) ** 2).sum())
            target = ceps[f] * unit
            left = np.einsum("st,stk->k", smat @ W, mult)
            right = np.einsum("st,stk->k", W @ smat.T, mult)
            sq["antipode_left"] += float((np.abs(left - target) ** 2).sum())
            sq["antipode_right"] += float((np.abs(right - target) ** 2).sum())
            # Delta(f*) versus Delta(f)*; star_perm is involutive so indexing both
            # axes by it realizes the (s, t) -> (s*, t*) relabelling
            col_star = dk[:, star[f]]
            w_star = W.conj()[np.ix_(star, star)].reshape(-1)
            sq["comul_star"] += float((np.abs(col_star - w_star) ** 2).sum())
        # multiplicativity on all basis pairs
        cm = self.comul.matrix
        basis_cols = [self.split.product.from_coords(cm[:, f]) for f in range(D)]
        for s in range(D):
            ds = basis_cols[s]
            for t in range(D):
                prod_coords = cm @ mult[s, t]
                diff = (ds * basis_cols[t]).coords() - prod_coords
                sq["comul_multiplicative"] += float((np.abs(diff) ** 2).sum())

        residuals = {name: float(np.sqrt(v)) for name, v in sq.items()}
        residuals["antipode_involutive"] = float(
            np.linalg.norm(smat @ smat - np.eye(D))
        )
        return HopfAxiomReport(residuals)

    def is_cocommutative(self, tol=1e-10):
        D = self.dim
        worst = 0.0
        for f in range(D):
            W = self.comul_kron[:, f].reshape(D, D)
            worst = max(worst, float(np.abs(W - W.T).max()))
        return worst <= tol

    def is_commutative(self, tol=1e-10):
        mult = self.structure.mult_table
        return float(np.abs(mult - mult.transpose(1, 0, 2)).max()) <= tol

    # -- group-like projections -------------------------------------------------

    def group_like_residual(self, p):
        """Operator norm of Delta(p)(1 (x) p) - p (x) p."""
        dp = self.comul(p)
        rhs = self.split.elem(p, p)
        lhs = dp * self.split.elem(self.unit, p)
        return (lhs - rhs).norm_inf()

    def _group_like_defect_batch(self, coords):
        """Coordinates of Delta(p)(1 (x) p) - p (x) p for a batch of candidate coords.

        Works in Kronecker order, where right multiplication by (1 (x) p)
        is W |-> W R_p with R_p the right-multiplication matrix of p; returns
        an (n, D*D) complex array whose rows vanish exactly at group-likes.
        """
        coords = np.atleast_2d(coords)
        D = self.dim
        C = self.structure.mult_table
        W = (self.comul_kron @ coords.T).T.reshape(-1, D, D)
        right = np.einsum("tal,ia->itl", C, coords)
        lhs = np.einsum("ist,itl->isl", W, right)
        rhs = np.einsum("is,il->isl", coords, coords)
        return (lhs - rhs).reshape(len(coords), D * D)

    def is_group_like_projection(self, p, tol=GROUP_LIKE_TOL):
        """Test Delta(p)(1 (x) p) = p (x) p for a projection p."""
        if not is_projection(p, tol):
            raise DomainError("group-likeness is defined for projections")
        if self.group_like_residual(p) > tol:
            return False
        # consequences of group-likeness; numeric failure here is a bug
        if abs(self.counit(p) - 1.0) > max(tol, 1e-7):
            raise StructuralError("group-like projection with counit value != 1")
        if (self.antipode(p) - p).norm_inf() > max(tol, 1e-7):
            raise StructuralError("group-like projection not fixed by the antipode")
        return True

    def find_group_like_projections(self, grid=64, dedup_tol=1e-6):
        """Exhaustive group-like search for structures with blocks of size <= 2.

        Enumerates 0/1 choices on 1x1 blocks and rank 0/1/2 choices on 2x2
        blocks; rank-1 candidates are swept over a Bloch-sphere grid and
        refined by least squares on the defining residual.
        """
        dims = self.structure.dims
        if any(n > 2 for n in dims):
            raise UnsupportedError(
                "group-like search supports block dimensions <= 2 only"
            )

        def assemble_coords(choice, angles):
            # choice: per block, 0 / 1 (1x1) or 0 / "s" / 2 (2x2); angles per "s" block
            coords = np.zeros(self.structure.dim, dtype=complex)
            ai = 0
            for i, n in enumerate(dims):
                c = choice[i]
                off = self.structure.offsets[i]
                if n == 1:
                    coords[off] = c
                elif c == "s":
                    th, ph = angles[2 * ai], angles[2 * ai + 1]
                    ai += 1
                    nx = np.sin(th) * np.cos(ph)
                    ny = np.sin(th) * np.sin(ph)
                    nz = np.cos(th)
                    coords[off:off + 4] = 0.5 * np.array(
                        [1 + nz, nx - 1j * ny, nx + 1j * ny, 1 - nz]
                    )
                elif c == 2:
                    coords[off] = coords[off + 3] = 1.0
            return coords

        def residual_vec(choice, angles):
            defect = self._group_like_defect_batch(assemble_coords(choice, angles))[0]
            return np.concatenate([defect.real, defect.imag])

        found = []

        def record(coords):
            p = self.structure.from_coords(coords)
            for q in found:
                if (p - q).norm_inf() < dedup_tol:
                    return
            found.append(p)

        per_block = []
        for n in dims:
            per_block.append((0, 1) if n == 1 else (0, "s", 2))
        n_combos = int(np.prod([len(c) for c in per_block]))
        if n_combos > 2 ** 20:
            raise UnsupportedError("too many block sign combinations to enumerate")
        for choice in itertools.product(*per_block):
            spheres = sum(1 for c in choice if c == "s")
            if all(c == 0 for c in choice):
                continue
            if spheres == 0:
                coords = assemble_coords(choice, ())
                if np.linalg.norm(self._group_like_defect_batch(coords)[0]) <= 1e-10:
                    record(coords)
                continue
            starts = self._sphere_starts(
                lambda batch: self._group_like_defect_batch(batch),
                lambda angles: assemble_coords(choice, angles),
                spheres, grid,
            )
            for angles in starts:
                sol = optimize.least_squares(
                    lambda x: residual_vec(choice, x),
                    np.array(angles, dtype=float),
                    xtol=1e-15, ftol=1e-15, gtol=1e-15, method="lm",
                )
                if np.linalg.norm(sol.fun) <= _REFINE_TOL:
                    record(assemble_coords(choice, sol.x))

        for p in found:
            if not self.is_group_like_projection(p, GROUP_LIKE_TOL):
                raise StructuralError("search produced a non-group-like projection")
            if self.haar(p).real <= 0:
                raise StructuralError("group-like projection with nonpositive Haar mass")
        found.sort(key=lambda p: tuple(np.round(p.coords().real, 6))
                   + tuple(np.round(p.coords().imag, 6)))
        return found

    @staticmethod
    def _sphere_starts(defect_batch, assemble, spheres, grid):
        """Grid-scan the Bloch angles and return refinement starting points.

        For a single sphere this returns every local minimum of the grid x grid
        residual surface (phi wraps around); with several spheres it falls back
        to a coarser grid with a plain residual threshold.
        """
        if spheres == 1:
            thetas = np.linspace(0.0, np.pi, grid)
            phis = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
            batch = np.array([
                assemble((th, ph)) for th in thetas for ph in phis
            ])
            vals = np.linalg.norm(defect_batch(batch), axis=1).reshape(grid, grid)
            starts = []
            for a in range(grid):
                for b in range(grid):
                    v = vals[a, b]
                    neighbors = []
                    if a > 0:
                        neighbors.append(vals[a - 1, b])
                    if a < grid - 1:
                        neighbors.append(vals[a + 1, b])
                    neighbors.append(vals[a, (b - 1) % grid])
                    neighbors.append(vals[a, (b + 1) % grid])
                    if v < 0.25 and all(v <= nb for nb in neighbors):
                        starts.append((thetas[a], phis[b]))
            return starts
        g = max(8, int(round(grid ** (1.0 / spheres))))
        thetas = np.linspace(0.0, np.pi, g)
        phis = np.linspace(0.0, 2 * np.pi, g, endpoint=False)
        axes = [ax for _ in range(spheres) for ax in (thetas, phis)]
        all_angles = list(itertools.product(*axes))
        batch = np.array([assemble(angles) for angles in all_angles])
        vals = np.linalg.norm(defect_batch(batch), axis=1)
        order = np.argsort(vals)
        return [all_angles[i] for i in order[:128] if vals[i] < 0.25]

    # -- convolution on the algebra ----------------------------------------------

    def box_convolve(self, f, g):
        """Convolution product on the algebra: (haar (x) id)(((S (x) id) Delta(g)) (f (x) 1))."""
        W = self.delta_kron(g)
        sw = self.antipode.matrix @ W
        lhs = self.split.from_kron_coords(sw.reshape(-1))
        prod = lhs * self.split.elem(f, self.unit)
        return self.split.apply_left(self.haar, prod)

    def __repr__(self):
        return f"FiniteQuantumGroup({self.label!r}, dims={self.structure.dims})"
