"""Graded specifications and the algebra they generate.

A GradedSpec is a finite meet-semilattice, one matrix-block algebra per
index, and a structure morphism phi_{i,j}: A_j -> A_i for every comparable
pair i <= j. The axioms checked here are

  a) phi_{i,i} is the identity, and
  b) phi_{m,k}(phi_{k,i}(x) phi_{k,j}(y)) = phi_{m,i}(x) phi_{m,j}(y)
     for every pair (i, j) with k = i ^ j and every m <= k,

both exhaustively over canonical basis pairs (exact by bilinearity). Every
component is unital and finite-dimensional, so its multiplier algebra is
itself; the general theory's multiplier wrappers never appear and nothing
is lost by working with the components directly.

On top of the spec sit the total algebra (componentwise sums with the
convolution-like product routed through the bilinear family q), the
representations pi_i, the C*-norm sup_i ||pi_i(x)||, split exact sequences
along finishing index sets, graded morphisms into plain or graded targets,
and block-sum ideals with their quotient specs.
"""

from dataclasses import dataclass, field

import numpy as np

from . import findim as fd
from .errors import InputError, ValidationFailure
from .findim import AlgebraShape, StarHom

AXIOM_TOL = 1e-9
NORM_RTOL = 1e-8


class MissingHom(InputError):
    pass


class SpecMismatch(InputError):
    pass


class AxiomAViolation(ValidationFailure):
    pass


class AxiomBViolation(ValidationFailure):
    def __init__(self, i, j, m, xlabel, ylabel, residual):
        self.where = (i, j, m, xlabel, ylabel)
        self.residual = residual
        super().__init__(
            f"compatibility fails at indices (i={i}, j={j}, m={m}), "
            f"basis pair ({xlabel}, {ylabel}), residual {residual:.3e}"
        )


class HomNotStar(ValidationFailure):
    pass


class QAxiomViolation(ValidationFailure):
    pass


class NotFinishing(InputError):
    pass


class IncompatibleFamily(ValidationFailure):
    def __init__(self, detail):
        super().__init__(detail)


class NotAnIdeal(ValidationFailure):
    pass


class QuotientDegenerate(ValidationFailure):
    pass


class PathDependence(ValidationFailure):
    pass


class GradedSpec:
    """Semilattice + component shapes + structure morphisms.

    Construction checks structure only (all comparable pairs present, hom
    shapes line up); the numeric axioms are validate_spec's job, so that
    deliberately broken specs can be built and shown to fail.
    """

    def __init__(self, L, components, phi):
        components = tuple(components)
        if len(components) != L.n:
            raise SpecMismatch(f"{len(components)} components for {L.n} indices")
        for c in components:
            if not isinstance(c, AlgebraShape):
                raise SpecMismatch(f"component {c!r} is not an AlgebraShape")
        self.L = L
        self.components = components
        full = {}
        comparable = set(L.comparable_pairs())
        for (i, j), h in phi.items():
            if (i, j) not in comparable:
                raise SpecMismatch(
                    f"phi given for non-comparable pair ({L.names[i]}, {L.names[j]})"
                )
            if h.source != components[j] or h.target != components[i]:
                raise fd.ShapeMismatch(
                    f"phi[{L.names[i]},{L.names[j]}] maps {h.source} -> {h.target}, "
                    f"expected {components[j]} -> {components[i]}"
                )
            full[(i, j)] = h
        for i, j in comparable:
            if (i, j) in full:
                continue
            if i == j:
                full[(i, j)] = fd.identity_hom(components[i])
            else:
                raise MissingHom(
                    f"no structure morphism for {L.names[i]} <= {L.names[j]}"
                )
        self.phi = full
        self.offsets = []
        off = 0
        for c in components:
            self.offsets.append(off)
            off += c.dim
        self.total_dim = off
        self._pi_matrices = None

    def structure_map(self, i, j):
        """phi_{i,j}: A_j -> A_i for i <= j."""
        try:
            return self.phi[(i, j)]
        except KeyError:
            raise MissingHom(
                f"({self.L.names[i]}, {self.L.names[j]}) is not comparable"
            ) from None

    def zero_element(self):
        return GradedElement(self, [fd.zero(c) for c in self.components])

    def basis_element(self, i, a):
        x = self.zero_element()
        k, p, q = self.components[i].basis_triples()[a]
        x.comps[i].mats[k][p, q] = 1.0
        return x

    def component_unit(self, i):
        x = self.zero_element()
        x.comps[i] = fd.unit(self.components[i])
        return x

    def graded_basis(self):
        """(index, local basis position, global position) for every basis
        element of the total algebra."""
        out = []
        for i, c in enumerate(self.components):
            for a in range(c.dim):
                out.append((i, a, self.offsets[i] + a))
        return out

    def basis_label(self, i, a):
        return f"{self.L.names[i]}:{self.components[i].basis_label(a)}"

    def random_element(self, rng):
        return GradedElement(
            self, [fd.random_element(c, rng) for c in self.components]
        )

    def ambient_shape(self):
        """Concatenation of every component's blocks, in index order."""
        blocks = []
        for c in self.components:
            blocks.extend(c.blocks)
        return AlgebraShape(blocks)

    def pi_matrix(self, i):
        """Matrix of pi_i over the graded basis (dim A_i x total_dim)."""
        if self._pi_matrices is None:
            mats = []
            for t in range(self.L.n):
                m = np.zeros((self.components[t].dim, self.total_dim), dtype=complex)
                for j in range(self.L.n):
                    if self.L.leq(t, j):
                        m[:, self.offsets[j] : self.offsets[j] + self.components[j].dim] = (
                            self.phi[(t, j)].matrix
                        )
                mats.append(m)
            self._pi_matrices = mats
        return self._pi_matrices[i]

    def __repr__(self):
        dims = [c.dim for c in self.components]
        return f"GradedSpec({self.L!r}, component dims {dims})"


class GradedElement:
    """One component element per index; zero components allowed."""

    __slots__ = ("spec", "comps")

    def __init__(self, spec, comps):
        comps = list(comps)
        if len(comps) != spec.L.n:
            raise SpecMismatch(f"{len(comps)} components for {spec.L.n} indices")
        for c, shape in zip(comps, spec.components):
            if c.shape != shape:
                raise fd.ShapeMismatch(f"component in {c.shape}, expected {shape}")
        self.spec = spec
        self.comps = comps

    def support(self, tol=0.0):
        return frozenset(
            i for i, c in enumerate(self.comps) if fd.op_norm(c) > tol
        )

    def copy(self):
        return GradedElement(self.spec, [c.copy() for c in self.comps])

    def __add__(self, other):
        _same_spec(self, other)
        return GradedElement(
            self.spec, [a + b for a, b in zip(self.comps, other.comps)]
        )

    def __sub__(self, other):
        _same_spec(self, other)
        return GradedElement(
            self.spec, [a - b for a, b in zip(self.comps, other.comps)]
        )

    def __mul__(self, other):
        if isinstance(other, GradedElement):
            return gmul(self, other)
        return GradedElement(self.spec, [fd.scale(other, c) for c in self.comps])

    def __rmul__(self, scalar):
        return GradedElement(self.spec, [fd.scale(scalar, c) for c in self.comps])

    def __neg__(self):
        return -1.0 * self

    def __repr__(self):
        return f"GradedElement(support {sorted(self.support())})"


def _same_spec(x, y):
    if x.spec is not y.spec:
        raise SpecMismatch("elements belong to different specs")


def to_gvector(x):
    return np.concatenate(
        [fd.to_vector(c) for c in x.comps]
    ) if x.comps else np.zeros(0, dtype=complex)


def from_gvector(spec, v):
    v = np.asarray(v, dtype=complex)
    if v.shape != (spec.total_dim,):
        raise fd.ShapeMismatch(f"vector length {v.shape}, expected {spec.total_dim}")
    comps = []
    for c, off in zip(spec.components, spec.offsets):
        comps.append(fd.from_vector(c, v[off : off + c.dim]))
    return GradedElement(spec, comps)


# ------------------------------------------------------------ the q family

def q_from_phi(spec, i, j, x, y):
    """q_{i,j}(x, y) = phi_{k,i}(x) phi_{k,j}(y) in A_k, k = i ^ j."""
    k = spec.L.meet_of(i, j)
    return fd.mul(
        spec.structure_map(k, i).apply(x), spec.structure_map(k, j).apply(y)
    )


q_apply = q_from_phi


class QFamily:
    """The bilinear family q_{i,j}: A_i x A_j -> A_{i^j}, stored as one
    tensor (dim_k, dim_i, dim_j) per ordered pair."""

    def __init__(self, L, components, tensors):
        self.L = L
        self.components = tuple(components)
        self.tensors = tensors

    @classmethod
    def from_spec(cls, spec):
        tensors = {}
        n = spec.L.n
        for i in range(n):
            for j in range(n):
                k = spec.L.meet_of(i, j)
                di = spec.components[i].dim
                dj = spec.components[j].dim
                t = np.zeros((spec.components[k].dim, di, dj), dtype=complex)
                mki = fd.ambient_images(spec.structure_map(k, i))
                mkj = fd.ambient_images(spec.structure_map(k, j))
                rows, cols = fd.ambient_index_maps(spec.components[k])
                for a in range(di):
                    prod = mki[a] @ mkj  # (dj, side, side)
                    t[:, a, :] = prod[:, rows, cols].T
                tensors[(i, j)] = t
        return cls(spec.L, spec.components, tensors)

    def apply(self, i, j, x, y):
        v = np.einsum(
            "uab,a,b->u", self.tensors[(i, j)], fd.to_vector(x), fd.to_vector(y)
        )
        return fd.from_vector(self.components[self.L.meet_of(i, j)], v)

    def validate(self, tol=AXIOM_TOL):
        """Check a') q_{i,i} = multiplication, b') the adjoint symmetry,
        c') the mixed associativity q(q(x,y),z) = q(x,q(y,z))."""
        L, comps = self.L, self.components
        n = L.n
        for i in range(n):
            t = self.tensors[(i, i)]
            di = comps[i].dim
            triples = comps[i].basis_triples()
            index = {tr: a for a, tr in enumerate(triples)}
            want = np.zeros_like(t)
            for a, (k, p, q) in enumerate(triples):
                for b, (k2, p2, q2) in enumerate(triples):
                    if k2 == k and p2 == q:
                        want[index[(k, p, q2)], a, b] = 1.0
            r = float(np.abs(t - want).max()) if t.size else 0.0
            if r > tol:
                raise QAxiomViolation(
                    f"q_{{i,i}} is not multiplication at index {L.names[i]}, "
                    f"residual {r:.3e}"
                )
        for i in range(n):
            for j in range(n):
                k = L.meet_of(i, j)
                pi = fd.adjoint_permutation(comps[i])
                pj = fd.adjoint_permutation(comps[j])
                pk = fd.adjoint_permutation(comps[k])
                t = self.tensors[(i, j)]
                s = self.tensors[(j, i)]
                # q_{i,j}(E_a, E_b) = q_{j,i}(E_b*, E_a*)*
                want = np.conj(s[np.ix_(pk, pj, pi)]).transpose(0, 2, 1)
                r = float(np.abs(t - want).max()) if t.size else 0.0
                if r > tol:
                    raise QAxiomViolation(
                        f"adjoint symmetry fails for pair "
                        f"({L.names[i]}, {L.names[j]}), residual {r:.3e}"
                    )
        for i in range(n):
            for j in range(n):
                ij = L.meet_of(i, j)
                for k in range(n):
                    jk = L.meet_of(j, k)
                    lhs = np.einsum(
                        "wuc,uab->wabc",
                        self.tensors[(ij, k)],
                        self.tensors[(i, j)],
                        optimize=True,
                    )
                    rhs = np.einsum(
                        "wau,ubc->wabc",
                        self.tensors[(i, jk)],
                        self.tensors[(j, k)],
                        optimize=True,
                    )
                    r = float(np.abs(lhs - rhs).max()) if lhs.size else 0.0
                    if r > tol:
                        raise QAxiomViolation(
                            f"associativity fails at indices "
                            f"({L.names[i]}, {L.names[j]}, {L.names[k]}), "
                            f"residual {r:.3e}"
                        )
        return True


def q_family_from_spec(spec):
    """Assemble the full bilinear family from the structure morphisms."""
    return QFamily.from_spec(spec)


def phi_from_q(q, tol=AXIOM_TOL):
    """Recover the structure morphisms: phi_{i,j}(y) = q_{j,i}(y, 1_{A_i}).

    Valid because every component is unital. The q family is validated
    first; the output passes validate_spec whenever q satisfies its axioms.
    """
    q.validate(tol)
    phi = {}
    for i, j in q.L.comparable_pairs():
        unit_vec = fd.to_vector(fd.unit(q.components[i]))
        m = np.einsum("uab,b->ua", q.tensors[(j, i)], unit_vec)
        phi[(i, j)] = StarHom(q.components[j], q.components[i], m)
    return phi


def spec_from_q(q, tol=AXIOM_TOL):
    spec = GradedSpec(q.L, q.components, phi_from_q(q, tol))
    validate_spec(spec, tol)
    return spec


# ------------------------------------------------------------- validation

@dataclass
class SpecValidationReport:
    identity_residual: float
    hom_mult_residual: float
    hom_star_residual: float
    axiom_b_residual: float
    pairs_checked: int


def validate_spec(spec, tol=AXIOM_TOL):
    """Exhaustive numeric validation of the grading axioms.

    Checks, over canonical bases: phi_{i,i} = id, every phi is a
    *-homomorphism, and the two-variable compatibility axiom for every
    (i, j) and every m below i ^ j. Raises on the first failure; returns
    max residuals on success.
    """
    L = spec.L
    id_res = 0.0
    for i in range(L.n):
        h = spec.structure_map(i, i)
        delta = h.matrix - np.eye(spec.components[i].dim)
        r = float(np.abs(delta).max()) if delta.size else 0.0
        if r > tol:
            raise AxiomAViolation(
                f"phi[{L.names[i]},{L.names[i]}] differs from the identity "
                f"by {r:.3e}"
            )
        id_res = max(id_res, r)

    mult_res = star_res = 0.0
    for (i, j), h in sorted(spec.phi.items()):
        try:
            rep = fd.validate_starhom(h, tol)
        except ValidationFailure as e:
            raise HomNotStar(
                f"phi[{L.names[i]},{L.names[j]}]: {e}"
            ) from e
        mult_res = max(mult_res, rep.max_mult_residual)
        star_res = max(star_res, rep.max_star_residual)

    b_res = 0.0
    pairs = 0
    for i in range(L.n):
        for j in range(L.n):
            k = L.meet_of(i, j)
            below = [m for m in range(L.n) if L.leq(m, k)]
            prod_k = _pair_product_vectors(spec, k, i, j)
            for m in below:
                pairs += 1
                if m == k:
                    lhs = prod_k
                else:
                    lhs = np.einsum(
                        "uv,abv->abu", spec.structure_map(m, k).matrix, prod_k
                    )
                rhs = _pair_product_vectors(spec, m, i, j)
                r = float(np.abs(lhs - rhs).max()) if lhs.size else 0.0
                if r > tol:
                    flat = int(np.abs(lhs - rhs).reshape(-1).argmax())
                    di = spec.components[i].dim
                    dj = spec.components[j].dim
                    a, b = divmod(flat // spec.components[m].dim, dj) if dj else (0, 0)
                    raise AxiomBViolation(
                        L.names[i], L.names[j], L.names[m],
                        spec.basis_label(i, min(a, di - 1)),
                        spec.basis_label(j, b),
                        r,
                    )
                b_res = max(b_res, r)
    return SpecValidationReport(id_res, mult_res, star_res, b_res, pairs)


def _pair_product_vectors(spec, t, i, j):
    """vec(phi_{t,i}(E_a) phi_{t,j}(E_b)) for all basis pairs (a, b);
    shape (dim_i, dim_j, dim_t). Requires t <= i and t <= j."""
    mti = fd.ambient_images(spec.structure_map(t, i))
    mtj = fd.ambient_images(spec.structure_map(t, j))
    rows, cols = fd.ambient_index_maps(spec.components[t])
    di, dj = spec.components[i].dim, spec.components[j].dim
    out = np.zeros((di, dj, spec.components[t].dim), dtype=complex)
    for a in range(di):
        prod = mti[a] @ mtj
        out[a] = prod[:, rows, cols]
    return out


# --------------------------------------------------------- total algebra

def gadd(x, y):
    return x + y


def gmul(x, y):
    """(xy)_k = sum over i ^ j = k of q_{i,j}(x_i, y_j)."""
    _same_spec(x, y)
    spec = x.spec
    out = spec.zero_element()
    for i in x.support():
        for j in y.support():
            k = spec.L.meet_of(i, j)
            out.comps[k] = out.comps[k] + q_apply(spec, i, j, x.comps[i], y.comps[j])
    return out


def gadjoint(x):
    return GradedElement(x.spec, [fd.adjoint(c) for c in x.comps])


def pi_rep(spec, i, x):
    """pi_i(x) = sum over j >= i of phi_{i,j}(x_j), an element of A_i."""
    return fd.from_vector(spec.components[i], spec.pi_matrix(i) @ to_gvector(x))


def gnorm(spec, x):
    """The C*-norm: max over indices of the operator norm of pi_i(x)."""
    return max(fd.op_norm(pi_rep(spec, i, x)) for i in range(spec.L.n))


def faithful_image(spec, x):
    """Block-diagonal concatenation of every pi_i(x), one shape for all."""
    mats = []
    for i in range(spec.L.n):
        mats.extend(pi_rep(spec, i, x).mats)
    return fd.AlgElement(spec.ambient_shape(), mats)


def faithful_morphism(spec):
    """The sum of all pi_i as a graded morphism into the ambient shape.

    Injective on every valid spec; its operator norm realizes gnorm.
    """
    ambient = spec.ambient_shape()
    amb_offsets = []
    off = 0
    for c in spec.components:
        amb_offsets.append(off)
        off += c.dim
    psi = []
    for j in range(spec.L.n):
        m = np.zeros((ambient.dim, spec.components[j].dim), dtype=complex)
        for i in range(spec.L.n):
            if spec.L.leq(i, j):
                m[amb_offsets[i] : amb_offsets[i] + spec.components[i].dim, :] = (
                    spec.structure_map(i, j).matrix
                )
        psi.append(StarHom(spec.components[j], ambient, m))
    return build_morphism(spec, ambient, psi)


# ------------------------------------------------------- graded morphisms

class GradedMorphism:
    """A compatible family psi_i out of a spec's components.

    Plain target (an AlgebraShape): the maps land in one common algebra and
    satisfy psi_{j^k}(q_{j,k}(x,y)) = psi_j(x) psi_k(y); the unique linear
    extension to the total algebra is then a *-homomorphism.

    Graded target (a GradedSpec over the same semilattice): psi_i: A_i -> B_i
    intertwines the structure morphisms; the total map is block-diagonal
    over the graded bases.
    """

    def __init__(self, source, target, psi):
        self.source = source
        self.target = target
        self.psi = list(psi)
        if len(self.psi) != source.L.n:
            raise SpecMismatch(f"{len(self.psi)} maps for {source.L.n} indices")

    @property
    def graded_target(self):
        return isinstance(self.target, GradedSpec)

    def target_dim(self):
        return self.target.total_dim if self.graded_target else self.target.dim

    def total_matrix(self):
        src = self.source
        out = np.zeros((self.target_dim(), src.total_dim), dtype=complex)
        for i in range(src.L.n):
            cols = slice(src.offsets[i], src.offsets[i] + src.components[i].dim)
            if self.graded_target:
                rows = slice(
                    self.target.offsets[i],
                    self.target.offsets[i] + self.target.components[i].dim,
                )
                out[rows, cols] = self.psi[i].matrix
            else:
                out[:, cols] = self.psi[i].matrix
        return out

    def apply(self, x):
        if x.spec is not self.source:
            raise SpecMismatch("element from a different spec")
        v = self.total_matrix() @ to_gvector(x)
        if self.graded_target:
            return from_gvector(self.target, v)
        return fd.from_vector(self.target, v)


def build_morphism(spec, target, psi, tol=AXIOM_TOL):
    """Validate a component family and wrap it as a GradedMorphism.

    Every psi_i must already be a *-homomorphism; the compatibility (plain
    target) or intertwining (graded target) condition is checked on all
    basis pairs and failures name the offending pair.
    """
    m = GradedMorphism(spec, target, psi)
    L = spec.L
    if m.graded_target:
        if target.L is not L and target.L.meet != L.meet:
            raise SpecMismatch("graded target lives over a different semilattice")
        for i in range(L.n):
            h = m.psi[i]
            if h.source != spec.components[i] or h.target != target.components[i]:
                raise fd.ShapeMismatch(
                    f"psi[{L.names[i]}] maps {h.source} -> {h.target}"
                )
            fd.validate_starhom(h, tol)
        for i, j in L.comparable_pairs():
            lhs = m.psi[i].matrix @ spec.structure_map(i, j).matrix
            rhs = target.structure_map(i, j).matrix @ m.psi[j].matrix
            r = float(np.abs(lhs - rhs).max()) if lhs.size else 0.0
            if r > tol:
                raise IncompatibleFamily(
                    f"psi does not intertwine structure maps at pair "
                    f"({L.names[i]}, {L.names[j]}), residual {r:.3e}"
                )
        return m
    for i in range(L.n):
        h = m.psi[i]
        if h.source != spec.components[i] or h.target != target:
            raise fd.ShapeMismatch(f"psi[{L.names[i]}] maps {h.source} -> {h.target}")
        fd.validate_starhom(h, tol)
    for j in range(L.n):
        for k in range(L.n):
            t = L.meet_of(j, k)
            dj, dk = spec.components[j].dim, spec.components[k].dim
            for a in range(dj):
                xa = fd.basis_element(spec.components[j], a)
                img_a = m.psi[j].image_of_basis(a)
                for b in range(dk):
                    yb = fd.basis_element(spec.components[k], b)
                    lhs = m.psi[t].apply(q_apply(spec, j, k, xa, yb))
                    rhs = fd.mul(img_a, m.psi[k].image_of_basis(b))
                    r = fd.frob_norm(lhs - rhs)
                    if r > tol:
                        raise IncompatibleFamily(
                            f"psi_{{j^k}}(xy) != psi_j(x) psi_k(y) at "
                            f"({spec.basis_label(j, a)}, {spec.basis_label(k, b)}), "
                            f"residual {r:.3e}"
                        )
    return m


@dataclass
class MorphismAnalysis:
    injective: bool
    surjective: bool
    ker_dims: list
    image_dims: list
    joint_image_dim: int
    total_kernel_dim: int
    componentwise: bool = field(default=False)


def _rank(matrix):
    if matrix.size == 0:
        return 0
    s = np.linalg.svd(matrix, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > fd.RANK_RTOL * s[0]))


def analyze_morphism(m):
    """Injectivity/surjectivity verdicts with the ranks that support them.

    Plain target: injective iff every component map is injective and the
    component images are in direct sum (sum of image dims equals the joint
    span's dimension); surjective iff the joint span fills the target.
    Graded target: verdicts are componentwise; the reported total kernel
    always comes from the total matrix's rank, so the componentwise story
    can be checked against it.
    """
    src = m.source
    ker_dims = [fd.kernel_dim(h) for h in m.psi]
    image_dims = [fd.image_dim(h) for h in m.psi]
    total = m.total_matrix()
    total_rank = _rank(total)
    total_kernel = src.total_dim - total_rank
    if m.graded_target:
        injective = all(k == 0 for k in ker_dims)
        surjective = all(
            image_dims[i] == m.target.components[i].dim for i in range(src.L.n)
        )
        joint = total_rank
        return MorphismAnalysis(
            injective, surjective, ker_dims, image_dims, joint, total_kernel,
            componentwise=True,
        )
    joint = total_rank
    direct_sum = sum(image_dims) == joint
    injective = all(k == 0 for k in ker_dims) and direct_sum
    surjective = joint == m.target.dim
    return MorphismAnalysis(
        injective, surjective, ker_dims, image_dims, joint, total_kernel
    )


# ------------------------------------------------- split exact sequences

def restrict_spec(spec, M):
    """The sub-spec over a meet-closed index set, plus old->new index map."""
    M = sorted(set(M))
    if not spec.L.is_subsemilattice(M):
        raise InputError(f"{M} is not meet-closed")
    remap = {old: new for new, old in enumerate(M)}
    table = [[remap[spec.L.meet_of(a, b)] for b in M] for a in M]
    names = [spec.L.names[a] for a in M]
    from .semilattice import Semilattice

    subL = Semilattice(table, names)
    comps = [spec.components[a] for a in M]
    phi = {}
    for ni, oi in enumerate(M):
        for nj, oj in enumerate(M):
            if subL.leq(ni, nj):
                phi[(ni, nj)] = spec.structure_map(oi, oj)
    return GradedSpec(subL, comps, phi), remap


class FinishingSplit:
    """The split exact sequence along a finishing index set M.

    p zeroes every component outside M and lands in the restricted spec;
    sigma is the inclusion. p o sigma is the identity exactly (both are 0/1
    coordinate selections); ker p is spanned by the components off M.
    """

    def __init__(self, spec, M, tol=AXIOM_TOL):
        M = frozenset(M)
        if not spec.L.is_finishing_subsemilattice(M) or not M:
            raise NotFinishing(
                f"{sorted(M)} is not a nonempty finishing sub-semilattice"
            )
        self.spec = spec
        self.M = M
        self.sub_spec, self.remap = restrict_spec(spec, M)
        self.kernel_dim = sum(
            spec.components[i].dim for i in range(spec.L.n) if i not in M
        )
        self.mult_residual = self._multiplicativity_residual(tol)

    def p(self, x):
        if x.spec is not self.spec:
            raise SpecMismatch("element from a different spec")
        comps = [x.comps[old].copy() for old in sorted(self.M)]
        return GradedElement(self.sub_spec, comps)

    def sigma(self, y):
        if y.spec is not self.sub_spec:
            raise SpecMismatch("element from a different sub-spec")
        out = self.spec.zero_element()
        for old, new in self.remap.items():
            out.comps[old] = y.comps[new].copy()
        return out

    def _multiplicativity_residual(self, tol):
        worst = 0.0
        for i, a, _ in self.spec.graded_basis():
            xa = self.spec.basis_element(i, a)
            pxa = self.p(xa)
            for j, b, _ in self.spec.graded_basis():
                yb = self.spec.basis_element(j, b)
                lhs = self.p(gmul(xa, yb))
                rhs = gmul(pxa, self.p(yb))
                r = max(
                    fd.frob_norm(c - d) for c, d in zip(lhs.comps, rhs.comps)
                ) if lhs.comps else 0.0
                worst = max(worst, r)
        return worst


def project_finishing(spec, M, x):
    """Apply the finishing projection to one element."""
    return FinishingSplit(spec, M).p(x)


def finishing_split(spec, M, tol=AXIOM_TOL):
    return FinishingSplit(spec, M, tol)


# --------------------------------------------------------------- ideals

@dataclass
class IdealGradationReport:
    ideal_dim: int
    max_leak: float
    quotient: GradedSpec
    quotient_maps: list


def verify_ideal_gradation(spec, ideal_blocks, tol=AXIOM_TOL):
    """Check a per-index block selection spans a two-sided *-ideal and
    build the graded quotient.

    Ideals are parametrized by block subsets, which is complete in finite
    dimension: every closed two-sided ideal of a matrix-block algebra is a
    sub-sum of blocks, and the graded intersection I ^ A_i is then exactly
    the selected blocks at i.
    """
    L = spec.L
    selection = {}
    for i in range(L.n):
        chosen = frozenset(ideal_blocks.get(i, ()))
        nb = spec.components[i].nblocks
        if any(not 0 <= b < nb for b in chosen):
            raise InputError(
                f"index {L.names[i]}: block selection {sorted(chosen)} out of "
                f"range for {nb} blocks"
            )
        selection[i] = chosen

    def in_ideal(i, a):
        k, _, _ = spec.components[i].basis_triples()[a]
        return k in selection[i]

    ideal_basis = [
        (i, a) for i, a, _ in spec.graded_basis() if in_ideal(i, a)
    ]
    ideal_dim = len(ideal_basis)

    max_leak = 0.0
    for i, a, _ in spec.graded_basis():
        xa = spec.basis_element(i, a)
        for j, b in ideal_basis:
            eb = spec.basis_element(j, b)
            for prod in (gmul(xa, eb), gmul(eb, xa)):
                leak = 0.0
                for k in prod.support(tol=0.0):
                    keep = [
                        blk in selection[k]
                        for blk in range(spec.components[k].nblocks)
                    ]
                    for blk, m in enumerate(prod.comps[k].mats):
                        if not keep[blk]:
                            leak = max(leak, float(np.abs(m).max()) if m.size else 0.0)
                max_leak = max(max_leak, leak)
                if leak > tol:
                    raise NotAnIdeal(
                        f"product of {spec.basis_label(i, a)} and "
                        f"{spec.basis_label(j, b)} leaves the selected blocks "
                        f"by {leak:.3e}"
                    )

    # quotient: drop the selected blocks, compress the structure maps
    quot_comps = []
    keep_coords = []
    for i in range(L.n):
        kept_blocks = [
            d
            for blk, d in enumerate(spec.components[i].blocks)
            if blk not in selection[i]
        ]
        quot_comps.append(AlgebraShape(kept_blocks))
        coords = [
            a
            for a, (k, _, _) in enumerate(spec.components[i].basis_triples())
            if k not in selection[i]
        ]
        keep_coords.append(np.asarray(coords, dtype=int))

    quot_phi = {}
    for (i, j), h in spec.phi.items():
        sub = h.matrix[np.ix_(keep_coords[i], keep_coords[j])]
        dropped = np.asarray(
            [a for a in range(spec.components[j].dim) if a not in set(keep_coords[j])],
            dtype=int,
        )
        if dropped.size:
            # well-definedness on the quotient: phi must map the ideal
            # coordinates at j into the ideal coordinates at i
            leak_m = h.matrix[np.ix_(keep_coords[i], dropped)]
            if leak_m.size and float(np.abs(leak_m).max()) > tol:
                raise NotAnIdeal(
                    f"phi[{L.names[i]},{L.names[j]}] maps the ideal outside "
                    f"itself by {float(np.abs(leak_m).max()):.3e}"
                )
        quot_phi[(i, j)] = StarHom(quot_comps[j], quot_comps[i], sub)
    quotient = GradedSpec(L, quot_comps, quot_phi)

    quotient_maps = [
        StarHom(
            spec.components[i],
            quot_comps[i],
            np.eye(spec.components[i].dim, dtype=complex)[keep_coords[i], :]
            if keep_coords[i].size
            else np.zeros((0, spec.components[i].dim), dtype=complex),
        )
        for i in range(L.n)
    ]

    # direct-sum check on the quotient components: stack the image of every
    # surviving basis vector inside the quotient's total space and compare
    # ranks
    cols = []
    for i in range(L.n):
        lift = np.zeros((quotient.total_dim, quot_comps[i].dim), dtype=complex)
        lift[quotient.offsets[i] : quotient.offsets[i] + quot_comps[i].dim, :] = (
            np.eye(quot_comps[i].dim)
        )
        cols.append(lift @ quotient_maps[i].matrix)
    stacked = np.concatenate(cols, axis=1) if cols else np.zeros((0, 0))
    if _rank(stacked) != quotient.total_dim:
        raise QuotientDegenerate("quotient components are not in direct sum")
    validate_spec(quotient, tol)
    return IdealGradationReport(ideal_dim, max_leak, quotient, quotient_maps)


# -------------------------------------------------------- commutativity

def components_commutative(spec):
    """Shape test: every block of every component is 1 x 1."""
    return all(all(d == 1 for d in c.blocks) for c in spec.components)


def total_commutative(spec, tol=AXIOM_TOL):
    """Basis test on the total algebra: xy = yx for all basis pairs."""
    for i, a, _ in spec.graded_basis():
        xa = spec.basis_element(i, a)
        for j, b, _ in spec.graded_basis():
            yb = spec.basis_element(j, b)
            d = gmul(xa, yb) - gmul(yb, xa)
            if any(fd.frob_norm(c) > tol for c in d.comps):
                return False
    return True


# --------------------------------------------- chain-closure convenience

def covering_pairs(L):
    """(i, j) with i < j and nothing strictly between."""
    out = []
    for i, j in L.comparable_pairs():
        if i == j:
            continue
        if any(
            t not in (i, j) and L.leq(i, t) and L.leq(t, j) for t in range(L.n)
        ):
            continue
        out.append((i, j))
    return out


def complete_phi_by_chains(L, components, partial, tol=AXIOM_TOL):
    """Fill in phi for all comparable pairs from covering-pair data.

    Composes along every maximal chain and insists the results agree to
    tol; disagreement is a hard error, since path independence is exactly
    what the compatibility axiom demands on chains.
    """
    covers = covering_pairs(L)
    for i, j in covers:
        if (i, j) not in partial:
            raise MissingHom(
                f"chain closure needs phi for covering pair "
                f"({L.names[i]}, {L.names[j]})"
            )
    up = {}
    for i, j in covers:
        up.setdefault(i, []).append(j)

    def paths(i, j):
        if i == j:
            return [[i]]
        out = []
        for t in up.get(i, []):
            if L.leq(t, j):
                out.extend([[i] + rest for rest in paths(t, j)])
        return out

    full = {}
    for i, j in L.comparable_pairs():
        if i == j:
            full[(i, j)] = fd.identity_hom(components[i])
            continue
        chains = paths(i, j)
        assert chains, (i, j)
        composed = []
        for chain_ in chains:
            h = fd.identity_hom(components[j])
            for a, b in reversed(list(zip(chain_, chain_[1:]))):
                h = fd.compose(partial[(a, b)], h)
            composed.append(h)
        base = composed[0]
        for other in composed[1:]:
            r = float(np.abs(base.matrix - other.matrix).max()) if base.matrix.size else 0.0
            if r > tol:
                raise PathDependence(
                    f"chain compositions for ({L.names[i]}, {L.names[j]}) "
                    f"disagree by {r:.3e}"
                )
        if (i, j) in partial:
            given = partial[(i, j)]
            r = float(np.abs(base.matrix - given.matrix).max()) if base.matrix.size else 0.0
            if r > tol:
                raise PathDependence(
                    f"given phi for ({L.names[i]}, {L.names[j]}) disagrees "
                    f"with its chain composition by {r:.3e}"
                )
            base = given
        full[(i, j)] = base
    return full
