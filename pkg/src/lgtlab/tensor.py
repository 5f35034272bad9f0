"""Tensor-product assembly of per-link operators and fermionic matter.

The full Hilbert space is (link_0 x link_1 x ... x link_{L-1}) x matter,
with link 0 the most significant tensor factor and the matter occupation
space (if present) last.  Product-basis indices therefore decompose as

    index = ((s_0 * d_1 + s_1) * d_2 + ...) * 2^modes + occupation_bits

which is what the Gauss-sector enumeration relies on.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse


@dataclass
class ProductSpace:
    lattice: object
    linkops: object                  # LinkOperatorSet shared by all links
    layout: object = None            # FermionLayout or None

    _eye_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_links(self):
        return self.lattice.link_count

    @property
    def link_dim(self):
        return self.linkops.local_dim

    @property
    def matter_dim(self):
        return 1 if self.layout is None else self.layout.dim

    @property
    def dim(self):
        return self.link_dim ** self.n_links * self.matter_dim

    def identity(self):
        return sparse.identity(self.dim, format="csr", dtype=complex)

    def _eye(self, d):
        if d not in self._eye_cache:
            self._eye_cache[d] = sparse.identity(d, format="csr", dtype=complex)
        return self._eye_cache[d]

    def link_op(self, link_idx, mat):
        """Embed a local link matrix at position link_idx."""
        left = self.link_dim ** link_idx
        right = self.link_dim ** (self.n_links - link_idx - 1) * self.matter_dim
        out = sparse.csr_matrix(mat, dtype=complex)
        if left > 1:
            out = sparse.kron(self._eye(left), out, format="csr")
        if right > 1:
            out = sparse.kron(out, self._eye(right), format="csr")
        return out

    def link_ops_product(self, pairs):
        """Product of local matrices on distinct links, one embedding pass.

        pairs: iterable of (link_idx, local matrix).  Falls back to the
        identity when pairs is empty.
        """
        mats = {}
        for idx, m in pairs:
            mats[idx] = m if idx not in mats else mats[idx] @ m
        out = None
        for idx in range(self.n_links):
            f = sparse.csr_matrix(mats[idx], dtype=complex) if idx in mats \
                else self._eye(self.link_dim)
            out = f if out is None else sparse.kron(out, f, format="csr")
        if out is None:
            out = self._eye(1)
        if self.matter_dim > 1:
            out = sparse.kron(out, self._eye(self.matter_dim), format="csr")
        return out

    def matter_op(self, mat):
        """Embed an operator acting on the matter factor."""
        if self.layout is None:
            raise ValueError("space carries no matter")
        links = self.link_dim ** self.n_links
        out = sparse.csr_matrix(mat, dtype=complex)
        if links > 1:
            out = sparse.kron(self._eye(links), out, format="csr")
        return out

    def product_state_index(self, link_values, matter_index=0):
        """Full-space index of |link_values> x |matter_index>."""
        idx = 0
        for s in link_values:
            idx = idx * self.link_dim + int(s)
        return idx * self.matter_dim + int(matter_index)

    def decompose_index(self, index):
        """Inverse of product_state_index: (link tuple, matter index)."""
        matter = index % self.matter_dim
        rest = index // self.matter_dim
        vals = []
        for _ in range(self.n_links):
            vals.append(rest % self.link_dim)
            rest //= self.link_dim
        return tuple(reversed(vals)), matter

    def basis_vector(self, index):
        v = np.zeros(self.dim, dtype=complex)
        v[index] = 1.0
        return v
