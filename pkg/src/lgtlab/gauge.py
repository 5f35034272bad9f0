"""Gauss-law generators, gauge sectors, and gauge transformations.

For the Abelian families the generators are diagonal in the product basis
(flux eigenbasis x occupation basis), so sectors are enumerated exactly by
scanning eigenvalues; no linear algebra is involved.  For SU(2) the three
generators per vertex do not commute and the zero-charge sector is obtained
as the joint numerical kernel.

Conventions:

* U(1)/spin-gauge:  G_n = sum_out L - sum_in L - Q_n, integer spectrum.
* Z_N:              G_n = prod_out P^dag prod_in P (x exp(i delta Q_n) with
                    matter), unitary with eigenvalues exp(-i delta m).
* SU(2):            G^a_n = sum_out L^a - sum_in R^a - Q^a_n; the three
                    components close the left-type algebra
                    [G^i, G^j] = -i eps_ijk G^k at each vertex.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.linalg import expm

from . import matter as matter_mod
from .lattice import staggered_sign

_DENSE_LIMIT = 6000


@dataclass
class GaussSector:
    """A static-charge sector with an explicit basis.

    Either `indices` (product-basis positions, Abelian enumeration) or
    `basis` (orthonormal columns, non-Abelian kernel) is set.
    """

    charges: tuple
    dim_full: int
    indices: np.ndarray = None
    basis: np.ndarray = field(default=None, repr=False)

    @property
    def dim(self):
        if self.indices is not None:
            return len(self.indices)
        return 0 if self.basis is None else self.basis.shape[1]

    @property
    def is_empty(self):
        return self.dim == 0

    def basis_matrix(self):
        """Isometry from the sector onto the full space (dense columns)."""
        if self.basis is not None:
            return self.basis
        B = np.zeros((self.dim_full, self.dim), dtype=complex)
        for col, idx in enumerate(self.indices):
            B[idx, col] = 1.0
        return B

    def selection(self):
        """Sparse selection isometry (only for enumeration sectors)."""
        if self.indices is None:
            raise ValueError("sector has no product-basis index list")
        data = np.ones(self.dim)
        return sparse.csr_matrix(
            (data, (self.indices, np.arange(self.dim))),
            shape=(self.dim_full, self.dim), dtype=complex)

    def projector(self):
        B = self.basis_matrix()
        return B @ B.conj().T


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def _charge_ops(space):
    """Diagonal matter charge per vertex (staggered or naive), embedded."""
    layout = space.layout
    out = []
    for v in range(space.lattice.vertex_count):
        q = matter_mod.charge_operator(layout, v)
        out.append(space.matter_op(q))
    return out


def gauss_generators_u1(space):
    """Hermitian generators div L - Q for U(1)-truncated or spin-gauge links."""
    lat = space.lattice
    flux = space.linkops["flux"]
    charges = _charge_ops(space) if space.layout is not None else None
    gens = []
    for v in range(lat.vertex_count):
        out_links, in_links = lat.links_at_vertex(v)
        g = None
        for l in out_links:
            t = space.link_op(l, flux)
            g = t if g is None else g + t
        for l in in_links:
            g = -space.link_op(l, flux) if g is None else g - space.link_op(l, flux)
        if g is None:
            g = sparse.csr_matrix((space.dim, space.dim), dtype=complex)
        if charges is not None:
            g = g - charges[v]
        gens.append(g.tocsr())
    return gens


def gauss_generators_zn(space):
    """Unitary Z_N generators prod P^dag (outgoing) prod P (incoming).

    With staggered matter the vertex factor exp(i delta Q_n) is included so
    that the hopping psi^dag Q^dag psi stays invariant; eigenvalues are
    exp(-i delta (div m - Q_n)).
    """
    lat = space.lattice
    P = space.linkops["P"]
    Pdag = space.linkops["Pdag"]
    delta = 2.0 * np.pi / space.linkops.param
    gens = []
    for v in range(lat.vertex_count):
        out_links, in_links = lat.links_at_vertex(v)
        pairs = [(l, Pdag) for l in out_links] + [(l, P) for l in in_links]
        g = space.link_ops_product(pairs)
        if space.layout is not None:
            q = matter_mod.charge_operator(space.layout, v)
            qdiag = np.asarray(q.diagonal()).real
            phase = np.exp(1j * delta * qdiag)
            g = g @ space.matter_op(sparse.diags(phase))
        gens.append(g.tocsr())
    return gens


def gauss_generators_su2(space, link_space):
    """Three generators per vertex: sum_out L^a - sum_in R^a - Q^a."""
    lat = space.lattice
    gens = []
    for v in range(lat.vertex_count):
        out_links, in_links = lat.links_at_vertex(v)
        triple = []
        for axis in "xyz":
            g = None
            for l in out_links:
                t = space.link_op(l, link_space.L[axis])
                g = t if g is None else g + t
            for l in in_links:
                t = space.link_op(l, link_space.R[axis])
                g = -t if g is None else g - t
            if g is None:
                g = sparse.csr_matrix((space.dim, space.dim), dtype=complex)
            if space.layout is not None:
                g = g - space.matter_op(
                    matter_mod.su2_charge(space.layout, v, axis))
            triple.append(g.tocsr())
        gens.append(triple)
    return gens


# ---------------------------------------------------------------------------
# sectors
# ---------------------------------------------------------------------------

def _diagonal_of(op):
    return np.asarray(op.diagonal()).real


def abelian_charge_table(space):
    """Integer matrix (n_vertices x dim) of div(flux) - Q per basis state."""
    lat = space.lattice
    flux_vals = space.linkops.flux_values
    dim = space.dim
    table = np.zeros((lat.vertex_count, dim))
    for v in range(lat.vertex_count):
        out_links, in_links = lat.links_at_vertex(v)
        d = np.zeros(dim)
        for l in out_links:
            d += _diagonal_of(space.link_op(l, np.diag(flux_vals)))
        for l in in_links:
            d -= _diagonal_of(space.link_op(l, np.diag(flux_vals)))
        if space.layout is not None:
            q = matter_mod.charge_operator(space.layout, v)
            d -= _diagonal_of(space.matter_op(q))
        table[v] = d
    return np.rint(table).astype(int)


def sector_basis(space, charges, modular=False):
    """Enumerate the Abelian Gauss sector with the given static charges.

    charges: one integer per vertex (for Z_N interpreted modulo N, labeling
    the eigenvalue exp(-i delta q)).  Returns a GaussSector whose basis is a
    sorted list of product-state indices; empty sectors are valid results.
    """
    lat = space.lattice
    charges = tuple(int(q) for q in charges)
    if len(charges) != lat.vertex_count:
        raise ValueError("one charge per vertex required")
    table = abelian_charge_table(space)
    target = np.array(charges)[:, None]
    if modular:
        n = space.linkops.param
        ok = np.all((table - target) % n == 0, axis=0)
    else:
        ok = np.all(table == target, axis=0)
    idx = np.nonzero(ok)[0]
    return GaussSector(charges, space.dim, indices=np.sort(idx))


def su2_zero_charge_sector(space, generators, tol=1e-10):
    """Orthonormal basis of the joint kernel of all G^a_n (zero charge).

    Built from the positive semidefinite sum of squares; eigenvectors with
    eigenvalue below tol span the sector.
    """
    dim = space.dim
    if dim > _DENSE_LIMIT:
        raise ValueError(
            f"dense kernel computation refused for dimension {dim}")
    acc = np.zeros((dim, dim), dtype=complex)
    for triple in generators:
        for g in triple:
            gd = g.toarray()
            acc += gd.conj().T @ gd
    w, v = np.linalg.eigh(acc)
    cols = np.nonzero(w < tol)[0]
    if len(cols) == 0:
        return GaussSector((0,) * len(generators), dim, basis=None,
                           indices=np.array([], dtype=int))
    return GaussSector((0,) * len(generators), dim, basis=v[:, cols])


def all_sector_dimensions(space, modular=False):
    """Map {charge tuple -> dimension} over every occupied Abelian sector."""
    table = abelian_charge_table(space)
    if modular:
        table = table % space.linkops.param
    out = {}
    for col in range(table.shape[1]):
        key = tuple(int(x) for x in table[:, col])
        out[key] = out.get(key, 0) + 1
    return out


# ---------------------------------------------------------------------------
# gauge transformations
# ---------------------------------------------------------------------------

def gauge_transformation_unitary(space, generators, angles):
    """Theta = prod_n exp(i sum_a angle^a_n G^a_n) for Hermitian generators.

    angles: sequence over vertices; each entry is a float (Abelian) or a
    3-sequence (SU(2)).  Conjugation with Theta leaves gauge-invariant
    operators intact.
    """
    dim = space.dim
    if dim > _DENSE_LIMIT:
        raise ValueError(f"dense exponential refused for dimension {dim}")
    theta = np.eye(dim, dtype=complex)
    for v, a in enumerate(angles):
        gen = generators[v]
        if isinstance(gen, (list, tuple)):
            h = sum(float(ai) * gi.toarray() for ai, gi in zip(a, gen))
        else:
            h = float(a) * gen.toarray()
        theta = expm(1j * h) @ theta
    return theta


def zn_gauge_transformation(space, generators, powers):
    """Theta = prod_n G_n^{k_n} for the unitary Z_N generators."""
    out = sparse.identity(space.dim, format="csr", dtype=complex)
    for v, k in enumerate(powers):
        g = generators[v]
        for _ in range(int(k) % space.linkops.param):
            out = out @ g
    return out.tocsr()


def canonical_sign_transform(lat, link_values):
    """Flip per-link field samples by (-1)^(x+y) of the link's origin vertex.

    Maps sum-Gauss-law data into divergence form; applying it twice is the
    identity.
    """
    if lat.spatial_dim != 2:
        raise ValueError("sign transform is defined on 2d lattices")
    vals = np.asarray(link_values, dtype=float)
    if vals.shape[0] != lat.link_count:
        raise ValueError("one value per link required")
    out = vals.copy()
    for l in range(lat.link_count):
        v, _k = lat.links[l]
        out[l] *= staggered_sign(lat.vertices[v])
    return out
