"""Assembly of the lattice gauge Hamiltonians as sparse operators.

Terms (all assembled as T + T^dag so Hermiticity is structural):

* electric:  (g^2/2) sum_links L^2 (U(1)), L_z^2 (spin-gauge), Casimir
             (SU(2)); for Z_N the clock form -(lambda_zn/2) sum (P + P^dag).
* magnetic:  -(1/2g^2) sum_plaq (U1 U2 U3^dag U4^dag + h.c.) with the
             spin-gauge normalization 1/(ell^2 (ell+1)^2) and the Z_N form
             -(1/2) sum (Q1 Q2 Q3^dag Q4^dag + h.c.).
* gauge-matter: eps sum_links psi^dag_n U psi_{n+k} + h.c. with the model's
             link operator; the naive-fermion variant carries the Dirac
             structure i psi^dag sigma_k psi.
* mass:      staggered m sum (-1)^n psi^dag psi or naive M sum psi^dag
             sigma_z psi.
* penalty:   lambda sum_n G_n^2 (Abelian generators).
* microscopic hopping: the gauge-variant single-atom move between
             perpendicular neighboring links, eta sum (U_a U_b^dag + h.c.),
             which seeds the second-order plaquette construction.

Static charges never appear as operators; they only label Gauss sectors.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse

from . import gauge, linkalg, matter as matter_mod, su2rep
from .lattice import staggered_sign
from .tensor import ProductSpace

KS_U1 = "ks_u1"
SPIN_GAUGE = "spin_gauge"
ZN = "zn"
SU2 = "su2"

MODELS = (KS_U1, SPIN_GAUGE, ZN, SU2)

DEFAULT_TERMS = ("electric", "magnetic", "gauge_matter", "mass")


@dataclass
class HamiltonianSpec:
    model: str = KS_U1
    truncation: float = 1          # cutoff, ell, N or J_max
    g2: float = 1.0
    eps: float = 0.0               # gauge-matter strength
    mass: float = 0.0              # staggered m or naive M
    lam: float = 0.0               # Gauss penalty strength
    lam_zn: float = 1.0            # Z_N electric (clock) coupling
    eta: float = 0.0               # microscopic diagonal-hopping strength
    matter: str = None             # None, staggered, naive2d, su2fundamental
    terms: tuple = None            # None = every applicable default term

    def with_terms(self, *terms):
        return replace(self, terms=tuple(terms))

    def validate(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.g2 <= 0:
            raise ValueError("g2 must be positive")
        if self.lam < 0:
            raise ValueError("penalty strength must be >= 0")
        if self.matter is not None and self.matter not in (
                matter_mod.STAGGERED, matter_mod.NAIVE2D,
                matter_mod.SU2_FUNDAMENTAL):
            raise ValueError(f"unknown matter scheme {self.matter!r}")
        if self.model == SU2 and self.matter not in (
                None, matter_mod.SU2_FUNDAMENTAL):
            raise ValueError("SU(2) links need the two-color matter layout")
        if self.model != SU2 and self.matter == matter_mod.SU2_FUNDAMENTAL:
            raise ValueError("two-color matter needs SU(2) links")
        if self.terms is not None:
            unknown = set(self.terms) - {"electric", "magnetic",
                                         "gauge_matter", "mass", "penalty",
                                         "hopping"}
            if unknown:
                raise ValueError(f"unknown terms {sorted(unknown)}")
        return self


@dataclass
class Model:
    """A HamiltonianSpec realized on a concrete lattice."""

    spec: HamiltonianSpec
    lattice: object
    space: ProductSpace
    link_space: object = None      # SU2LinkSpace for the non-Abelian model
    rotation: object = None        # TruncatedRotationMatrix (j = 1/2)
    _generators: object = field(default=None, repr=False)

    @property
    def generators(self):
        """Gauss generators; a flat list (Abelian) or triples (SU(2))."""
        if self._generators is None:
            if self.spec.model == ZN:
                self._generators = gauge.gauss_generators_zn(self.space)
            elif self.spec.model == SU2:
                self._generators = gauge.gauss_generators_su2(
                    self.space, self.link_space)
            else:
                self._generators = gauge.gauss_generators_u1(self.space)
        return self._generators

    def effective_terms(self, terms=None):
        terms = self.spec.terms if terms is None else terms
        if terms is None:
            terms = [t for t in DEFAULT_TERMS
                     if not (t == "magnetic" and self.lattice.spatial_dim == 1)]
        elif "magnetic" in terms and self.lattice.spatial_dim == 1:
            raise ValueError("magnetic term toggled on for a 1d chain")
        return tuple(terms)

    def hamiltonian(self, terms=None):
        terms = self.effective_terms(terms)
        h = sparse.csr_matrix((self.space.dim, self.space.dim), dtype=complex)
        builders = {
            "electric": h_electric,
            "magnetic": h_magnetic,
            "gauge_matter": h_gauge_matter,
            "mass": h_mass,
            "penalty": h_penalty,
            "hopping": h_microscopic_hopping,
        }
        for t in terms:
            h = h + builders[t](self)
        return h.tocsr()


def link_operator_set(spec):
    if spec.model == KS_U1:
        return linkalg.u1_ops(int(spec.truncation))
    if spec.model == SPIN_GAUGE:
        return linkalg.spin_gauge_ops(int(spec.truncation))
    if spec.model == ZN:
        return linkalg.zn_ops(int(spec.truncation))
    raise ValueError("SU(2) uses su2rep.su2_link_space, not a LinkOperatorSet")


def build_model(spec, lat):
    """Realize a HamiltonianSpec on a lattice: spaces, link ops, matter."""
    spec.validate()
    layout = None
    if spec.matter is not None:
        layout = matter_mod.fermion_ops(lat, spec.matter)

    if spec.model == SU2:
        lsp = su2rep.su2_link_space(spec.truncation)
        rot = su2rep.truncated_rotation_matrix(lsp, 0.5)
        ops = {"flux": lsp.casimir}
        linkops = linkalg.LinkOperatorSet("su2_truncated", lsp.local_dim,
                                          spec.truncation, ops)
        space = ProductSpace(lat, linkops, layout)
        return Model(spec, lat, space, link_space=lsp, rotation=rot)

    linkops = link_operator_set(spec)
    space = ProductSpace(lat, linkops, layout)
    return Model(spec, lat, space)


# ---------------------------------------------------------------------------
# individual terms
# ---------------------------------------------------------------------------

def _zero(space):
    return sparse.csr_matrix((space.dim, space.dim), dtype=complex)


def h_electric(model):
    spec, space = model.spec, model.space
    h = _zero(space)
    if spec.model == ZN:
        P = space.linkops["P"]
        local = -(spec.lam_zn / 2.0) * (P + P.conj().T)
        for l in range(space.n_links):
            h = h + space.link_op(l, local)
        return h.tocsr()
    if spec.model == SU2:
        local = (spec.g2 / 2.0) * model.link_space.casimir
    else:
        flux = space.linkops["flux"]
        local = (spec.g2 / 2.0) * (flux @ flux)
    for l in range(space.n_links):
        h = h + space.link_op(l, local)
    return h.tocsr()


def _plaquette_operator(model, plaq):
    """U1 U2 U3^dag U4^dag (or the model's analog) for one plaquette."""
    space = model.space
    spec = model.spec
    l1, l2, l3, l4 = plaq.links
    if spec.model == SU2:
        # trace over the 2x2 representation indices of operator entries
        U = model.rotation
        Ud = U.dagger()
        ms = (0.5, -0.5)
        out = _zero(space)
        for a in ms:
            for b in ms:
                for c in ms:
                    for d in ms:
                        term = space.link_ops_product([
                            (l1, U.entry(a, b)),
                            (l2, U.entry(b, c)),
                            (l3, Ud.entry(c, d)),
                            (l4, Ud.entry(d, a)),
                        ])
                        out = out + term
        return out
    if spec.model == ZN:
        up, dn = space.linkops["Q"], space.linkops["Qdag"]
    else:
        up, dn = space.linkops["U"], space.linkops["Udag"]
    return space.link_ops_product([(l1, up), (l2, up), (l3, dn), (l4, dn)])


def h_magnetic(model):
    spec, space = model.spec, model.space
    if model.lattice.spatial_dim == 1:
        raise ValueError("magnetic term undefined on a 1d chain")
    if spec.model == ZN:
        coeff = -0.5
    else:
        # the spin-gauge U is already L_+/sqrt(ell(ell+1)), so the printed
        # 1/(2 g^2 ell^2 (ell+1)^2) normalization is carried by the product
        coeff = -1.0 / (2.0 * spec.g2)
    h = _zero(space)
    for plaq in model.lattice.plaquettes:
        op = _plaquette_operator(model, plaq)
        h = h + coeff * (op + op.conj().T)
    return h.tocsr()


def h_gauge_matter(model):
    spec, space = model.spec, model.space
    if spec.eps == 0.0 or spec.matter is None:
        return _zero(space)
    layout = space.layout
    lat = model.lattice
    h = _zero(space)

    if spec.matter == matter_mod.NAIVE2D:
        if spec.model not in (SPIN_GAUGE, KS_U1):
            raise ValueError("naive fermions pair with U(1)-type links")
        sigma = {1: matter_mod._SIGMA["x"], 2: matter_mod._SIGMA["y"]}
        up = space.linkops["U"]
        for l in range(lat.link_count):
            a, b = lat.link_endpoints(l)
            k = lat.links[l][1]
            s = sigma[k]
            ferm = _zero_matter(layout)
            for i in range(2):
                for j in range(2):
                    if s[i, j] == 0:
                        continue
                    ferm = ferm + s[i, j] * (layout.cdag(a, i) @ layout.c(b, j))
            term = 1j * spec.eps * space.link_op(l, up) @ space.matter_op(ferm)
            h = h + term + term.conj().T
        return h.tocsr()

    if spec.model == SU2:
        U = model.rotation
        ms = (0.5, -0.5)
        for l in range(lat.link_count):
            a, b = lat.link_endpoints(l)
            for i, m in enumerate(ms):
                for j, mp in enumerate(ms):
                    ferm = layout.cdag(a, i) @ layout.c(b, j)
                    term = spec.eps * space.link_op(l, U.entry(m, mp)) \
                        @ space.matter_op(ferm)
                    h = h + term + term.conj().T
        return h.tocsr()

    # staggered single-species matter on Abelian links
    up = space.linkops["Qdag"] if spec.model == ZN else space.linkops["U"]
    for l in range(lat.link_count):
        a, b = lat.link_endpoints(l)
        ferm = layout.cdag(a) @ layout.c(b)
        term = spec.eps * space.link_op(l, up) @ space.matter_op(ferm)
        h = h + term + term.conj().T
    return h.tocsr()


def _zero_matter(layout):
    return sparse.csr_matrix((layout.dim, layout.dim), dtype=complex)


def h_mass(model):
    spec, space = model.spec, model.space
    if spec.matter is None or spec.mass == 0.0:
        return _zero(space)
    layout = space.layout
    lat = model.lattice
    ferm = _zero_matter(layout)
    if spec.matter == matter_mod.NAIVE2D:
        for v in range(lat.vertex_count):
            ferm = ferm + layout.number(v, 0) - layout.number(v, 1)
    else:
        for v in range(lat.vertex_count):
            sign = staggered_sign(lat.vertices[v])
            for s in range(layout.species_per_vertex):
                ferm = ferm + sign * layout.number(v, s)
    return (spec.mass * space.matter_op(ferm)).tocsr()


def h_penalty(model):
    spec = model.spec
    if spec.model not in (KS_U1, SPIN_GAUGE):
        raise ValueError("penalty term implemented for Hermitian Abelian "
                         "generators only")
    h = _zero(model.space)
    for g in model.generators:
        h = h + g @ g
    return (spec.lam * h).tocsr()


def h_microscopic_hopping(model):
    """Gauge-variant single-atom hopping between perpendicular links.

    eta sum over perpendicular link pairs of (U_a U_b^dag + h.c.).  Each
    hop shifts the flux on exactly one link up and one down, violating the
    divergence law at the two far endpoints; pairs of hops close plaquettes
    at second order in perturbation theory.
    """
    from .lattice import diagonal_link_pairs
    spec, space = model.spec, model.space
    if spec.model not in (KS_U1, SPIN_GAUGE):
        raise ValueError("microscopic hopping defined for U(1)-type links")
    if model.lattice.spatial_dim != 2:
        raise ValueError("diagonal hopping needs a 2d lattice")
    up, dn = space.linkops["U"], space.linkops["Udag"]
    h = _zero(space)
    for (a, b, _v) in diagonal_link_pairs(model.lattice):
        term = spec.eta * space.link_ops_product([(a, up), (b, dn)])
        h = h + term + term.conj().T
    return h.tocsr()


def commutator_norm(h, g):
    """max-abs entry of [H, G] for sparse operators."""
    c = h @ g - g @ h
    if c.nnz == 0:
        return 0.0
    return float(np.max(np.abs(c.data)))


def max_gauss_violation(model, h=None):
    """max over vertices (and components) of ||[H, G_n]||_maxabs."""
    h = model.hamiltonian() if h is None else h
    worst = 0.0
    for gen in model.generators:
        comps = gen if isinstance(gen, (list, tuple)) else [gen]
        for g in comps:
            worst = max(worst, commutator_norm(h, g))
    return worst
