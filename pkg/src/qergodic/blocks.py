"""Direct sums of complex matrix blocks: the finite-dimensional C*-algebra layer.

An algebra is a list of block dimensions (n_1, ..., n_N).  Everything --
elements, linear functionals, linear maps -- is stored against one canonical
coordinate basis: the blocks of an element concatenated in row-major order,
so the coordinate space has dimension D = sum(n_i**2).  Tensor products of
two such algebras are again of this form (Kronecker blocks in lexicographic
order); :class:`TensorSplit` holds the bookkeeping between the canonical
coordinates of the product and the Kronecker order of the factors.
"""

from __future__ import annotations

import numbers

import numpy as np

POSITIVITY_TOL = 1e-9
CLUSTER_TOL = 1e-8


class ShapeError(ValueError):
    """Operands live on different block structures."""


class DomainError(ValueError):
    """An argument violates an operation's precondition."""


class BlockStructure:
    """Ordered list of matrix-block dimensions, immutable after construction."""

    __slots__ = ("dims", "offsets", "dim", "_mult_table", "_star_perm")

    def __init__(self, dims):
        dims = tuple(int(n) for n in dims)
        if not dims:
            raise ValueError("at least one block is required")
        if any(n <= 0 for n in dims):
            raise ValueError("block dimensions must be positive")
        self.dims = dims
        offsets = [0]
        for n in dims:
            offsets.append(offsets[-1] + n * n)
        self.offsets = tuple(offsets)
        self.dim = offsets[-1]
        self._mult_table = None
        self._star_perm = None

    def __eq__(self, other):
        return isinstance(other, BlockStructure) and self.dims == other.dims

    def __hash__(self):
        return hash(self.dims)

    def __repr__(self):
        return f"BlockStructure{self.dims}"

    def index(self, block, row, col):
        """Canonical coordinate of the (row, col) entry of a block."""
        n = self.dims[block]
        return self.offsets[block] + row * n + col

    def split(self, coords):
        coords = np.asarray(coords, dtype=complex)
        if coords.shape != (self.dim,):
            raise ShapeError(f"expected {self.dim} coordinates, got {coords.shape}")
        return [
            coords[self.offsets[i]:self.offsets[i + 1]].reshape(n, n)
            for i, n in enumerate(self.dims)
        ]

    def element(self, blocks):
        return AlgebraElement(self, blocks)

    def from_coords(self, coords):
        return AlgebraElement(self, self.split(coords))

    def zero(self):
        return self.element([np.zeros((n, n), dtype=complex) for n in self.dims])

    def unit(self):
        return self.element([np.eye(n, dtype=complex) for n in self.dims])

    def basis_element(self, k):
        coords = np.zeros(self.dim, dtype=complex)
        coords[k] = 1.0
        return self.from_coords(coords)

    def basis(self):
        return [self.basis_element(k) for k in range(self.dim)]

    @property
    def star_perm(self):
        """Permutation p with coords(a*) = conj(coords(a))[p]."""
        if self._star_perm is None:
            perm = np.empty(self.dim, dtype=np.intp)
            for i, n in enumerate(self.dims):
                for r in range(n):
                    for c in range(n):
                        perm[self.index(i, r, c)] = self.index(i, c, r)
            self._star_perm = perm
        return self._star_perm

    @property
    def mult_table(self):
        """Dense structure constants C[s, t, :] = coords(e_s * e_t)."""
        if self._mult_table is None:
            D = self.dim
            table = np.zeros((D, D, D), dtype=complex)
            for i, n in enumerate(self.dims):
                for r in range(n):
                    for c in range(n):
                        s = self.index(i, r, c)
                        for c2 in range(n):
                            # E_{r,c} E_{c,c2} = E_{r,c2}; cross-block products vanish
                            table[s, self.index(i, c, c2), self.index(i, r, c2)] = 1.0
            self._mult_table = table
        return self._mult_table


class AlgebraElement:
    """Member of a direct sum of matrix blocks."""

    __slots__ = ("structure", "blocks", "_coords")

    def __init__(self, structure, blocks):
        if len(blocks) != len(structure.dims):
            raise ShapeError("block count does not match the structure")
        frozen = []
        for n, b in zip(structure.dims, blocks):
            arr = np.array(b, dtype=complex)
            if arr.shape != (n, n):
                raise ShapeError(f"expected a {n}x{n} block, got {arr.shape}")
            arr.flags.writeable = False
            frozen.append(arr)
        self.structure = structure
        self.blocks = tuple(frozen)
        self._coords = None

    def coords(self):
        if self._coords is None:
            c = np.concatenate([b.reshape(-1) for b in self.blocks])
            c.flags.writeable = False
            self._coords = c
        return self._coords

    def _check_same(self, other):
        if self.structure != other.structure:
            raise ShapeError("elements live on different block structures")

    def __add__(self, other):
        self._check_same(other)
        return AlgebraElement(self.structure, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check_same(other)
        return AlgebraElement(self.structure, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.structure, [-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return AlgebraElement(self.structure, [a * other for a in self.blocks])
        if isinstance(other, AlgebraElement):
            self._check_same(other)
            return AlgebraElement(self.structure, [a @ b for a, b in zip(self.blocks, other.blocks)])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, numbers.Number):
            return AlgebraElement(self.structure, [other * a for a in self.blocks])
        return NotImplemented

    def adjoint(self):
        return AlgebraElement(self.structure, [a.conj().T for a in self.blocks])

    def norm_inf(self):
        """Operator norm: the largest singular value over all blocks."""
        return max(np.linalg.norm(b, 2) for b in self.blocks)

    def is_hermitian(self, tol=POSITIVITY_TOL):
        return (self - self.adjoint()).norm_inf() <= tol

    def __repr__(self):
        return f"AlgebraElement(dims={self.structure.dims})"


class LinearFunctional:
    """Linear functional stored as a coefficient row against the coordinate basis."""

    __slots__ = ("structure", "coeffs")

    def __init__(self, structure, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (structure.dim,):
            raise ShapeError(f"expected {structure.dim} coefficients, got {coeffs.shape}")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        self.structure = structure
        self.coeffs = coeffs

    def __call__(self, element):
        if element.structure != self.structure:
            raise ShapeError("functional and element structures differ")
        return complex(self.coeffs @ element.coords())

    def __repr__(self):
        return f"LinearFunctional(dims={self.structure.dims})"


class AlgebraMap:
    """Linear map between block algebras, stored as a coordinate matrix."""

    __slots__ = ("domain", "codomain", "matrix")

    def __init__(self, domain, codomain, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (codomain.dim, domain.dim):
            raise ShapeError(
                f"expected a {codomain.dim}x{domain.dim} matrix, got {matrix.shape}"
            )
        matrix = matrix.copy()
        matrix.flags.writeable = False
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix

    @classmethod
    def identity(cls, structure):
        return cls(structure, structure, np.eye(structure.dim))

    def __call__(self, element):
        if element.structure != self.domain:
            raise ShapeError("element is not in the map's domain")
        return self.codomain.from_coords(self.matrix @ element.coords())

    def compose(self, inner):
        """self after inner."""
        if inner.codomain != self.domain:
            raise ShapeError("composition shapes do not agree")
        return AlgebraMap(inner.domain, self.codomain, self.matrix @ inner.matrix)

    def __matmul__(self, inner):
        return self.compose(inner)

    def transpose_on_functional(self, functional):
        """phi |-> phi o self."""
        if functional.structure != self.codomain:
            raise ShapeError("functional is not on the map's codomain")
        return LinearFunctional(self.domain, self.matrix.T @ functional.coeffs)


class TensorSplit:
    """Tensor product A (x) B of two block algebras, with factor bookkeeping.

    ``perm`` relates canonical coordinates of the product structure to the
    Kronecker order of the factors: coords(a (x) b) = kron(ca, cb)[perm].
    """

    __slots__ = ("left", "right", "product", "perm", "inv_perm")

    def __init__(self, left, right):
        self.left = left
        self.right = right
        dims = [na * nb for na in left.dims for nb in right.dims]
        self.product = BlockStructure(dims)
        DB = right.dim
        perm = np.empty(self.product.dim, dtype=np.intp)
        pos = 0
        for ia, na in enumerate(left.dims):
            for ib, nb in enumerate(right.dims):
                for r1 in range(na):
                    for r2 in range(nb):
                        for c1 in range(na):
                            for c2 in range(nb):
                                perm[pos] = (left.index(ia, r1, c1) * DB
                                             + right.index(ib, r2, c2))
                                pos += 1
        self.perm = perm
        self.inv_perm = np.argsort(perm)

    def elem(self, a, b):
        if a.structure != self.left or b.structure != self.right:
            raise ShapeError("factors do not match the tensor split")
        blocks = [np.kron(ba, bb) for ba in a.blocks for bb in b.blocks]
        return self.product.element(blocks)

    def functional(self, phi, psi):
        if phi.structure != self.left or psi.structure != self.right:
            raise ShapeError("factors do not match the tensor split")
        return LinearFunctional(self.product, np.kron(phi.coeffs, psi.coeffs)[self.perm])

    def map_tensor(self, m1, m2, codomain_split=None):
        """m1 (x) m2 as a map between product structures."""
        if m1.domain != self.left or m2.domain != self.right:
            raise ShapeError("map domains do not match the tensor split")
        cod = codomain_split or self
        if m1.codomain != cod.left or m2.codomain != cod.right:
            raise ShapeError("map codomains do not match the codomain split")
        big = np.kron(m1.matrix, m2.matrix)
        return AlgebraMap(self.product, cod.product, big[cod.perm][:, self.perm])

    def kron_coords(self, element):
        """Coordinates of a product-structure element in Kronecker order."""
        if element.structure != self.product:
            raise ShapeError("element is not in the product structure")
        return element.coords()[self.inv_perm]

    def from_kron_coords(self, w):
        return self.product.from_coords(np.asarray(w, dtype=complex)[self.perm])

    def apply_left(self, phi, element):
        """(phi (x) id) applied to an element of the product."""
        w = self.kron_coords(element).reshape(self.left.dim, self.right.dim)
        return self.right.from_coords(phi.coeffs @ w)

    def apply_right(self, phi, element):
        """(id (x) phi) applied to an element of the product."""
        w = self.kron_coords(element).reshape(self.left.dim, self.right.dim)
        return self.left.from_coords(w @ phi.coeffs)


def hermitian_part(a):
    return (a + a.adjoint()) * 0.5


def is_positive(a, tol=POSITIVITY_TOL):
    """Hermitian within ``tol`` and all block eigenvalues >= -tol."""
    if not a.is_hermitian(tol):
        return False
    for b in a.blocks:
        if np.linalg.eigvalsh((b + b.conj().T) / 2).min() < -tol:
            return False
    return True


def is_projection(a, tol=POSITIVITY_TOL):
    return (a - a.adjoint()).norm_inf() <= tol and (a - a * a).norm_inf() <= tol


def spectral_decomposition(a, cluster_tol=CLUSTER_TOL, herm_tol=POSITIVITY_TOL):
    """Eigenvalues and spectral projections of a Hermitian element.

    Returns ``[(lam, P)]`` with eigenvalues ascending, eigenvalues closer than
    ``cluster_tol`` merged into a single projection.  The projections are
    pairwise orthogonal and sum to the unit.
    """
    if not a.is_hermitian(herm_tol):
        raise DomainError("spectral decomposition requires a Hermitian element")
    eigs = []  # (eigenvalue, block index, eigenvector)
    for i, b in enumerate(a.blocks):
        vals, vecs = np.linalg.eigh((b + b.conj().T) / 2)
        for j, lam in enumerate(vals):
            eigs.append((float(lam), i, vecs[:, j]))
    eigs.sort(key=lambda t: t[0])
    out = []
    pos = 0
    while pos < len(eigs):
        end = pos + 1
        while end < len(eigs) and eigs[end][0] - eigs[end - 1][0] <= cluster_tol:
            end += 1
        cluster = eigs[pos:end]
        lam = sum(t[0] for t in cluster) / len(cluster)
        blocks = [np.zeros((n, n), dtype=complex) for n in a.structure.dims]
        for _, i, v in cluster:
            blocks[i] = blocks[i] + np.outer(v, v.conj())
        out.append((lam, a.structure.element(blocks)))
        pos = end
    return out


def support_of_positive(a, tol=POSITIVITY_TOL):
    """Range projection of a positive element: sum of spectral projections with eigenvalue > tol."""
    if not is_positive(a, tol):
        raise DomainError("support is defined for positive elements only")
    blocks = [np.zeros((n, n), dtype=complex) for n in a.structure.dims]
    out = a.structure.element(blocks)
    for lam, p in spectral_decomposition(a, herm_tol=max(tol, POSITIVITY_TOL)):
        if lam > tol:
            out = out + p
    return out


def abs_element(a, herm_tol=POSITIVITY_TOL):
    """|a|; from the spectrum of a when a is Hermitian, from a*a otherwise.

    Uses raw per-block eigenvalues (no clustering): merging eigenvalues that
    straddle zero would silently cancel their contributions to |a|.
    """
    def blockwise(elem, transform):
        blocks = []
        for b in elem.blocks:
            vals, vecs = np.linalg.eigh((b + b.conj().T) / 2)
            blocks.append((vecs * transform(vals)) @ vecs.conj().T)
        return elem.structure.element(blocks)

    if a.is_hermitian(herm_tol):
        return blockwise(a, np.abs)
    return blockwise(a.adjoint() * a, lambda v: np.sqrt(np.clip(v, 0.0, None)))


def p_norm(a, haar, p):
    """L^p norm of an element with respect to a faithful tracial state ``haar``.

    p = 1:   haar(|a|)
    p = 2:   haar(a* a) ** 0.5
    p = inf: the operator norm.
    """
    if p == 1:
        return float(haar(abs_element(a)).real)
    if p == 2:
        return float(np.sqrt(max(haar(a.adjoint() * a).real, 0.0)))
    if p in (np.inf, float("inf"), "inf"):
        return float(a.norm_inf())
    raise ValueError("p must be 1, 2 or inf")


def random_element(structure, rng, scale=1.0):
    blocks = [
        scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        for n in structure.dims
    ]
    return structure.element(blocks)


def random_hermitian(structure, rng, scale=1.0):
    return hermitian_part(random_element(structure, rng, scale))


def random_positive(structure, rng, scale=1.0):
    a = random_element(structure, rng, scale)
    return a.adjoint() * a
