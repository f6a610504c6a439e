import numpy as np
import pytest

from gradedcstar import findim as fd
from gradedcstar import graded as gr
from gradedcstar import semilattice as sl
from gradedcstar.errors import InputError

from conftest import (
    M2,
    SCALAR,
    all_scalar_spec,
    block_chain_spec,
    m2_chain_spec,
    mixed_diamond_spec,
    unital_embedding,
)


def as_matrix(x):
    assert len(x.mats) == 1
    return x.mats[0]


def scalar_of(x):
    return complex(as_matrix(x)[0, 0])


def graded_close(x, y, tol=1e-10):
    return all(fd.frob_norm(a - b) <= tol for a, b in zip(x.comps, y.comps))


# --------------------------------------------------------- construction

class TestConstruction:
    def test_missing_hom_rejected(self):
        L = sl.chain(2)
        with pytest.raises(gr.MissingHom):
            gr.GradedSpec(L, [SCALAR, SCALAR], {})

    def test_wrong_component_count(self):
        with pytest.raises(gr.SpecMismatch):
            gr.GradedSpec(sl.chain(2), [SCALAR], {})

    def test_noncomparable_key_rejected(self):
        L = sl.antichain_with_bottom(2)
        # indices 1 and 2 are incomparable atoms
        phi = {(1, 2): fd.identity_hom(SCALAR)}
        with pytest.raises(gr.SpecMismatch):
            gr.GradedSpec(L, [SCALAR] * 3, phi)

    def test_hom_shape_checked(self):
        L = sl.chain(2)
        bad = fd.identity_hom(M2)  # should be scalars -> M2
        with pytest.raises(fd.ShapeMismatch):
            gr.GradedSpec(L, [M2, SCALAR], {(0, 1): bad})

    def test_diagonals_autofilled(self):
        spec = m2_chain_spec()
        for i in range(2):
            h = spec.structure_map(i, i)
            assert np.allclose(h.matrix, np.eye(spec.components[i].dim))

    def test_structure_map_incomparable(self):
        spec = all_scalar_spec(sl.antichain_with_bottom(2))
        with pytest.raises(gr.MissingHom):
            spec.structure_map(1, 2)

    def test_total_dim_and_offsets(self):
        spec = mixed_diamond_spec()
        assert spec.total_dim == 4 + 4 + 1 + 1
        assert spec.offsets == [0, 4, 8, 9]


# ----------------------------------------------------------- validation

class TestValidateSpec:
    def test_corpus_passes(self, corpus):
        for name, spec in corpus.items():
            report = gr.validate_spec(spec)
            assert report.axiom_b_residual <= 1e-12, name
            assert report.identity_residual <= 1e-12, name

    def test_identity_axiom_violation(self):
        L = sl.chain(2)
        phi = {
            (0, 1): fd.identity_hom(SCALAR),
            (1, 1): fd.StarHom(SCALAR, SCALAR, np.array([[2.0]])),
        }
        spec = gr.GradedSpec(L, [SCALAR, SCALAR], phi)
        with pytest.raises(gr.AxiomAViolation):
            gr.validate_spec(spec)

    def test_non_star_hom_flagged(self):
        L = sl.chain(2)
        phi = {(0, 1): fd.StarHom(SCALAR, SCALAR, np.array([[2.0]]))}
        spec = gr.GradedSpec(L, [SCALAR, SCALAR], phi)
        with pytest.raises(gr.HomNotStar):
            gr.validate_spec(spec)

    def test_compatibility_violation(self):
        # three-level chain; the middle-to-top map is the corner embedding
        # diag(y, 0) while bottom-to-top is unital, so pushing a product
        # down disagrees with the product of pushdowns
        L = sl.chain(3)
        corner = fd.StarHom(SCALAR, M2, np.array([[1.0], [0], [0], [0]]))
        phi = {
            (1, 2): corner,
            (0, 1): fd.identity_hom(M2),
            (0, 2): unital_embedding(M2),
        }
        spec = gr.GradedSpec(L, [M2, M2, SCALAR], phi)
        with pytest.raises(gr.AxiomBViolation) as exc:
            gr.validate_spec(spec)
        assert exc.value.residual > 0.5

    def test_report_counts_pairs(self, corpus):
        spec = corpus["all-scalar-chain2"]
        report = gr.validate_spec(spec)
        # one check per ordered pair (i, j) and each m under i ^ j:
        # (0,0),(0,1),(1,0) see only m=0; (1,1) sees m=0 and m=1
        assert report.pairs_checked == 5


# ------------------------------------------------------------- q family

class TestQFamily:
    def test_same_index_is_multiplication(self, rng):
        spec = m2_chain_spec()
        x = fd.random_element(M2, rng)
        y = fd.random_element(M2, rng)
        out = gr.q_from_phi(spec, 0, 0, x, y)
        assert fd.frob_norm(out - fd.mul(x, y)) < 1e-12

    def test_all_scalar_diamond_cross_product(self):
        spec = all_scalar_spec(sl.diamond())
        a, b = spec.L.index_of("a"), spec.L.index_of("b")
        one = fd.unit(SCALAR)
        out = gr.q_from_phi(spec, a, b, one, one)
        assert out.shape == SCALAR
        assert abs(scalar_of(out) - 1.0) < 1e-12

    def test_scalar_times_matrix(self, rng):
        spec = m2_chain_spec()
        lam = fd.from_vector(SCALAR, np.array([1.5 - 0.5j]))
        m = fd.random_element(M2, rng)
        out = gr.q_from_phi(spec, 1, 0, lam, m)
        assert fd.frob_norm(out - fd.scale(1.5 - 0.5j, m)) < 1e-12

    def test_shape_mismatch(self):
        spec = m2_chain_spec()
        with pytest.raises(fd.ShapeMismatch):
            gr.q_from_phi(spec, 0, 0, fd.unit(SCALAR), fd.unit(M2))

    def test_family_axioms_hold_on_corpus(self, corpus):
        for name, spec in corpus.items():
            fam = gr.q_family_from_spec(spec)
            assert fam.validate(), name

    def test_family_apply_matches_pointwise(self, rng):
        spec = mixed_diamond_spec()
        fam = gr.q_family_from_spec(spec)
        for i in range(4):
            for j in range(4):
                x = fd.random_element(spec.components[i], rng)
                y = fd.random_element(spec.components[j], rng)
                d = fam.apply(i, j, x, y) - gr.q_from_phi(spec, i, j, x, y)
                assert fd.frob_norm(d) < 1e-12

    def test_broken_family_rejected(self):
        spec = all_scalar_spec(sl.diamond())
        fam = gr.q_family_from_spec(spec)
        a, b = spec.L.index_of("a"), spec.L.index_of("b")
        fam.tensors[(a, b)] = fam.tensors[(a, b)] + 0.25
        with pytest.raises(gr.QAxiomViolation):
            fam.validate()

    def test_phi_recovery_round_trip(self, corpus):
        for name in ("m2-chain", "all-scalar-diamond", "mixed-diamond"):
            spec = corpus[name]
            fam = gr.q_family_from_spec(spec)
            recovered = gr.phi_from_q(fam)
            assert set(recovered) == set(spec.phi), name
            for pair, h in spec.phi.items():
                delta = np.abs(recovered[pair].matrix - h.matrix)
                assert (delta.max() if delta.size else 0.0) <= 1e-10, (name, pair)

    def test_spec_from_q_validates(self, corpus):
        spec = corpus["block-chain"]
        rebuilt = gr.spec_from_q(gr.q_family_from_spec(spec))
        assert rebuilt.components == spec.components
        gr.validate_spec(rebuilt)


# ----------------------------------------------------------- arithmetic

class TestArithmetic:
    def test_all_scalar_units_multiply_to_meet(self, corpus):
        for name, spec in corpus.items():
            if not name.startswith("all-scalar"):
                continue
            for i in range(spec.L.n):
                for j in range(spec.L.n):
                    prod = gr.gmul(spec.component_unit(i), spec.component_unit(j))
                    want = spec.component_unit(spec.L.meet_of(i, j))
                    assert graded_close(prod, want), (name, i, j)

    def test_product_involution(self, corpus, rng):
        for name in ("m2-chain", "mixed-diamond", "block-chain"):
            spec = corpus[name]
            x = spec.random_element(rng)
            y = spec.random_element(rng)
            lhs = gr.gadjoint(gr.gmul(x, y))
            rhs = gr.gmul(gr.gadjoint(y), gr.gadjoint(x))
            assert graded_close(lhs, rhs), name

    def test_associativity_random(self, corpus, rng):
        for name in ("mixed-diamond", "all-scalar-chain4"):
            spec = corpus[name]
            x, y, z = (spec.random_element(rng) for _ in range(3))
            lhs = gr.gmul(gr.gmul(x, y), z)
            rhs = gr.gmul(x, gr.gmul(y, z))
            assert graded_close(lhs, rhs, tol=1e-9), name

    def test_top_unit_is_total_unit(self, corpus, rng):
        # when the top exists and maps down unitally, its unit is the unit
        for name in ("m2-chain", "all-scalar-diamond", "block-chain"):
            spec = corpus[name]
            top = spec.L.top()
            assert top is not None
            u = spec.component_unit(top)
            x = spec.random_element(rng)
            assert graded_close(gr.gmul(u, x), x), name
            assert graded_close(gr.gmul(x, u), x), name

    def test_mixed_spec_elements_rejected(self, corpus):
        x = corpus["m2-chain"].zero_element()
        y = corpus["all-scalar-chain2"].zero_element()
        with pytest.raises(gr.SpecMismatch):
            gr.gmul(x, y)

    def test_vector_round_trip(self, corpus, rng):
        spec = corpus["mixed-diamond"]
        x = spec.random_element(rng)
        back = gr.from_gvector(spec, gr.to_gvector(x))
        assert graded_close(x, back, tol=0.0)

    def test_support(self, corpus):
        spec = corpus["all-scalar-diamond"]
        x = spec.component_unit(1) + spec.component_unit(3)
        assert x.support() == {1, 3}
        assert spec.zero_element().support() == frozenset()


# -------------------------------------------------------------- pi_rep

class TestPiRep:
    def test_maximal_support_recovers_component(self, corpus, rng):
        for name, spec in corpus.items():
            x = spec.random_element(rng)
            supp = x.support()
            maximal = [
                m
                for m in supp
                if not any(j != m and spec.L.leq(m, j) for j in supp)
            ]
            assert maximal, name
            for m in maximal:
                got = gr.pi_rep(spec, m, x)
                assert fd.frob_norm(got - x.comps[m]) < 1e-12, name

    def test_incomparable_support_gives_zero(self):
        spec = all_scalar_spec(sl.antichain_with_bottom(3))
        x = spec.component_unit(1)
        assert fd.op_norm(gr.pi_rep(spec, 2, x)) == 0.0

    def test_chain_difference(self):
        spec = all_scalar_spec(sl.chain(2))
        x = spec.component_unit(1) - spec.component_unit(0)
        assert abs(scalar_of(gr.pi_rep(spec, 1, x)) - 1.0) < 1e-12
        assert abs(scalar_of(gr.pi_rep(spec, 0, x))) < 1e-12

    def test_pi_is_homomorphism(self, corpus, rng):
        for name in ("mixed-diamond", "m2-chain", "all-scalar-chain5"):
            spec = corpus[name]
            x = spec.random_element(rng)
            y = spec.random_element(rng)
            for i in range(spec.L.n):
                lhs = gr.pi_rep(spec, i, gr.gmul(x, y))
                rhs = fd.mul(gr.pi_rep(spec, i, x), gr.pi_rep(spec, i, y))
                assert fd.frob_norm(lhs - rhs) < 1e-9, name
                star = gr.pi_rep(spec, i, gr.gadjoint(x))
                assert fd.frob_norm(star - fd.adjoint(gr.pi_rep(spec, i, x))) < 1e-12


# --------------------------------------------------------------- gnorm

def step_norm_oracle(coeffs):
    """For an all-scalar chain, pi_i sums the coefficients at or above i,
    so the norm is the largest absolute tail sum (the sup norm of the
    matching step function)."""
    tails = np.cumsum(coeffs[::-1])[::-1]
    return float(np.abs(tails).max())


class TestGnorm:
    def test_bottom_unit(self, corpus):
        spec = corpus["all-scalar-diamond"]
        assert abs(gr.gnorm(spec, spec.component_unit(0)) - 1.0) < 1e-12

    def test_chain_difference(self):
        spec = all_scalar_spec(sl.chain(2))
        x = spec.component_unit(1) - spec.component_unit(0)
        assert abs(gr.gnorm(spec, x) - 1.0) < 1e-12

    def test_step_function_oracle(self, rng):
        for n in range(2, 9):
            spec = all_scalar_spec(sl.chain(n))
            coeffs = rng.normal(size=n)
            x = spec.zero_element()
            for i, c in enumerate(coeffs):
                x = x + c * spec.component_unit(i)
            assert abs(gr.gnorm(spec, x) - step_norm_oracle(coeffs)) < 1e-12

    def test_cstar_identity_random(self, corpus, rng):
        for name, spec in corpus.items():
            for _ in range(5):
                x = spec.random_element(rng)
                n1 = gr.gnorm(spec, gr.gmul(gr.gadjoint(x), x))
                n2 = gr.gnorm(spec, x) ** 2
                assert abs(n1 - n2) <= 1e-8 * (1.0 + n2), name

    def test_zero_iff_zero(self, corpus, rng):
        for name, spec in corpus.items():
            assert gr.gnorm(spec, spec.zero_element()) == 0.0
            x = spec.random_element(rng)
            assert gr.gnorm(spec, x) > 1e-6, name

    def test_matches_faithful_image_norm(self, corpus, rng):
        for name, spec in corpus.items():
            x = spec.random_element(rng)
            assert gr.gnorm(spec, x) == fd.op_norm(gr.faithful_image(spec, x)), name


# ----------------------------------------------------- faithful morphism

class TestFaithful:
    def test_zero_maps_to_zero(self, corpus):
        spec = corpus["mixed-diamond"]
        img = gr.faithful_image(spec, spec.zero_element())
        assert fd.op_norm(img) == 0.0

    def test_morphism_validates_and_is_injective(self, corpus):
        for name, spec in corpus.items():
            m = gr.faithful_morphism(spec)
            analysis = gr.analyze_morphism(m)
            assert analysis.injective, name
            assert analysis.total_kernel_dim == 0, name

    def test_image_matches_elementwise(self, corpus, rng):
        spec = corpus["block-chain"]
        m = gr.faithful_morphism(spec)
        x = spec.random_element(rng)
        d = m.apply(x) - gr.faithful_image(spec, x)
        assert fd.frob_norm(d) < 1e-12


# ------------------------------------------------------ finishing split

class TestFinishingSplit:
    def test_diamond_upper_pair(self, corpus):
        spec = corpus["all-scalar-diamond"]
        L = spec.L
        M = {L.index_of("a"), L.index_of("1")}
        split = gr.finishing_split(spec, M)
        p = split.p
        assert all(
            fd.op_norm(c) == 0.0 for c in p(spec.component_unit(0)).comps
        )
        assert all(
            fd.op_norm(c) == 0.0
            for c in p(spec.component_unit(L.index_of("b"))).comps
        )
        img = p(spec.component_unit(L.index_of("a")))
        new_a = split.remap[L.index_of("a")]
        assert abs(scalar_of(img.comps[new_a]) - 1.0) < 1e-12
        assert split.kernel_dim == 2
        assert split.mult_residual <= 1e-12

    def test_section_is_right_inverse_exactly(self, corpus):
        for name in ("all-scalar-diamond", "all-scalar-chain4", "mixed-diamond"):
            spec = corpus[name]
            for M in spec.L.enumerate_finishing_subsemilattices():
                split = gr.finishing_split(spec, M)
                for i in sorted(M):
                    for a in range(spec.components[i].dim):
                        x = split.p(spec.basis_element(i, a))
                        back = split.p(split.sigma(x))
                        assert all(
                            np.array_equal(c.mats[k], d.mats[k])
                            for c, d in zip(back.comps, x.comps)
                            for k in range(len(c.mats))
                        ), (name, M)

    def test_kernel_plus_image_fills_total(self, corpus):
        for name, spec in corpus.items():
            for k in range(spec.L.n):
                M = spec.L.finishing_set(k)
                split = gr.finishing_split(spec, M)
                image_dim = sum(spec.components[i].dim for i in M)
                assert split.kernel_dim + image_dim == spec.total_dim, (name, k)

    def test_full_set_is_identity(self, corpus, rng):
        spec = corpus["m2-chain"]
        split = gr.finishing_split(spec, range(spec.L.n))
        x = spec.random_element(rng)
        y = split.p(x)
        assert all(
            fd.frob_norm(c - d) == 0.0 for c, d in zip(x.comps, y.comps)
        )

    def test_non_finishing_rejected_with_counterexample(self, corpus):
        spec = corpus["all-scalar-diamond"]
        L = spec.L
        M = {L.index_of("0"), L.index_of("a")}
        assert L.is_subsemilattice(sorted(M))
        with pytest.raises(gr.NotFinishing):
            gr.finishing_split(spec, M)

        # the raw truncation genuinely fails to be multiplicative there
        def truncate(x):
            out = spec.zero_element()
            for i in M:
                out.comps[i] = x.comps[i].copy()
            return out

        ea = spec.component_unit(L.index_of("a"))
        eb = spec.component_unit(L.index_of("b"))
        lhs = truncate(gr.gmul(ea, eb))  # = e_bottom, which M keeps
        rhs = gr.gmul(truncate(ea), truncate(eb))
        assert not graded_close(lhs, rhs)

    def test_empty_set_rejected(self, corpus):
        with pytest.raises(gr.NotFinishing):
            gr.finishing_split(corpus["all-scalar-diamond"], set())

    def test_project_finishing_shortcut(self, corpus):
        spec = corpus["all-scalar-chain3"]
        out = gr.project_finishing(spec, {1, 2}, spec.component_unit(0))
        assert all(fd.op_norm(c) == 0.0 for c in out.comps)


# ------------------------------------------------------------ morphisms

class TestMorphisms:
    def test_identity_graded_morphism(self, corpus):
        spec = corpus["mixed-diamond"]
        psi = [fd.identity_hom(c) for c in spec.components]
        m = gr.build_morphism(spec, spec, psi)
        a = gr.analyze_morphism(m)
        assert a.injective and a.surjective
        assert a.total_kernel_dim == 0
        assert a.ker_dims == [0, 0, 0, 0]
        assert a.componentwise

    def test_zero_morphism_plain_target(self, corpus):
        spec = corpus["all-scalar-diamond"]
        psi = [fd.zero_hom(c, SCALAR) for c in spec.components]
        m = gr.build_morphism(spec, SCALAR, psi)
        a = gr.analyze_morphism(m)
        assert not a.injective
        assert not a.surjective
        assert a.total_kernel_dim == spec.total_dim

    def test_pi_bottom_as_plain_morphism(self, corpus):
        spec = corpus["all-scalar-diamond"]
        one = np.array([[1.0]])
        psi = [fd.StarHom(SCALAR, SCALAR, one) for _ in range(4)]
        m = gr.build_morphism(spec, SCALAR, psi)
        a = gr.analyze_morphism(m)
        assert a.surjective
        assert not a.injective
        assert a.total_kernel_dim == 3
        # every component map is injective; failure is the direct-sum test
        assert a.ker_dims == [0, 0, 0, 0]
        assert a.joint_image_dim == 1

    def test_finishing_character_family(self, corpus):
        spec = corpus["all-scalar-diamond"]
        L = spec.L
        keep = {L.index_of("a"), L.index_of("1")}
        psi = [
            fd.StarHom(SCALAR, SCALAR, np.array([[1.0 if i in keep else 0.0]]))
            for i in range(4)
        ]
        m = gr.build_morphism(spec, SCALAR, psi)
        a = gr.analyze_morphism(m)
        assert a.surjective and not a.injective

    def test_incompatible_family_rejected(self, corpus):
        spec = corpus["all-scalar-diamond"]
        L = spec.L
        keep = {L.index_of("a")}  # not upward closed, so not a character
        psi = [
            fd.StarHom(SCALAR, SCALAR, np.array([[1.0 if i in keep else 0.0]]))
            for i in range(4)
        ]
        with pytest.raises(gr.IncompatibleFamily):
            gr.build_morphism(spec, SCALAR, psi)

    def test_intertwining_failure_rejected(self, corpus):
        source = corpus["all-scalar-chain2"]
        target = corpus["m2-chain"]
        corner = fd.StarHom(SCALAR, M2, np.array([[1.0], [0], [0], [0]]))
        psi = [corner, fd.identity_hom(SCALAR)]
        with pytest.raises(gr.IncompatibleFamily):
            gr.build_morphism(source, target, psi)

    def test_unitary_conjugation_endomorphism(self, corpus, rng):
        spec = corpus["m2-chain"]
        theta = 0.7
        u = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]],
            dtype=complex,
        )
        images = []
        for a in range(4):
            e = fd.basis_element(M2, a)
            images.append(fd.AlgElement(M2, [u @ e.mats[0] @ u.conj().T]))
        conj = fd.StarHom.from_images(M2, M2, images)
        m = gr.build_morphism(spec, spec, [conj, fd.identity_hom(SCALAR)])
        a = gr.analyze_morphism(m)
        assert a.injective and a.surjective
        assert a.total_kernel_dim == 0

    def test_graded_kernel_additivity(self, corpus):
        # quotient maps onto the quotient by an ideal: componentwise
        # kernels sum to the total kernel
        spec = corpus["all-scalar-diamond"]
        L = spec.L
        commencing = {
            L.index_of("0"): {0},
            L.index_of("a"): {0},
            L.index_of("b"): {0},
        }
        report = gr.verify_ideal_gradation(spec, commencing)
        m = gr.build_morphism(spec, report.quotient, report.quotient_maps)
        a = gr.analyze_morphism(m)
        assert a.ker_dims == [1, 1, 1, 0]
        assert a.total_kernel_dim == sum(a.ker_dims)
        assert a.surjective

    def test_apply_matches_total_matrix(self, corpus, rng):
        spec = corpus["mixed-diamond"]
        m = gr.faithful_morphism(spec)
        x = spec.random_element(rng)
        via_matrix = m.total_matrix() @ gr.to_gvector(x)
        assert np.allclose(fd.to_vector(m.apply(x)), via_matrix, atol=1e-12)


# --------------------------------------------------------------- ideals

class TestIdeals:
    def test_empty_ideal_gives_back_spec(self, corpus):
        spec = corpus["mixed-diamond"]
        report = gr.verify_ideal_gradation(spec, {})
        assert report.ideal_dim == 0
        assert report.quotient.total_dim == spec.total_dim
        for pair, h in spec.phi.items():
            assert np.allclose(report.quotient.phi[pair].matrix, h.matrix)

    def test_full_ideal_gives_zero_quotient(self, corpus):
        spec = corpus["m2-chain"]
        everything = {
            i: set(range(spec.components[i].nblocks)) for i in range(2)
        }
        report = gr.verify_ideal_gradation(spec, everything)
        assert report.ideal_dim == spec.total_dim
        assert report.quotient.total_dim == 0

    def test_commencing_part_of_diamond(self, corpus):
        spec = corpus["all-scalar-diamond"]
        L = spec.L
        sel = {
            L.index_of("0"): {0},
            L.index_of("a"): {0},
            L.index_of("b"): {0},
        }
        report = gr.verify_ideal_gradation(spec, sel)
        assert report.ideal_dim == 3
        assert report.quotient.total_dim == 1
        assert report.quotient.components[L.index_of("1")].dim == 1

    def test_bottom_component_of_chain(self, corpus):
        spec = corpus["m2-chain"]
        report = gr.verify_ideal_gradation(spec, {0: {0}})
        assert report.ideal_dim == 4
        assert report.quotient.total_dim == 1

    def test_single_block_ideal(self, corpus):
        spec = corpus["block-chain"]
        report = gr.verify_ideal_gradation(spec, {0: {0}})
        assert report.ideal_dim == 4
        assert report.quotient.components[0].blocks == (1,)
        gr.validate_spec(report.quotient)

    def test_non_ideal_rejected(self, corpus):
        spec = corpus["all-scalar-diamond"]
        L = spec.L
        with pytest.raises(gr.NotAnIdeal):
            gr.verify_ideal_gradation(spec, {L.index_of("a"): {0}})

    def test_top_component_not_an_ideal(self, corpus):
        spec = corpus["m2-chain"]
        with pytest.raises(gr.NotAnIdeal):
            gr.verify_ideal_gradation(spec, {1: {0}})

    def test_block_out_of_range(self, corpus):
        spec = corpus["m2-chain"]
        with pytest.raises(InputError):
            gr.verify_ideal_gradation(spec, {0: {5}})


# -------------------------------------------------------- commutativity

class TestCommutativity:
    def test_equivalence_across_corpus(self, corpus):
        for name, spec in corpus.items():
            assert gr.components_commutative(spec) == gr.total_commutative(
                spec
            ), name

    def test_all_scalar_commutative(self, corpus):
        assert gr.total_commutative(corpus["all-scalar-diamond"])

    def test_matrix_component_not_commutative(self, corpus):
        assert not gr.components_commutative(corpus["m2-chain"])
        assert not gr.total_commutative(corpus["m2-chain"])


# -------------------------------------------------------- chain closure

class TestChainClosure:
    def test_diamond_covers(self):
        L = sl.diamond()
        covers = gr.covering_pairs(L)
        assert set(covers) == {(0, 1), (0, 2), (1, 3), (2, 3)}

    def test_all_scalar_completion(self):
        L = sl.diamond()
        partial = {pair: fd.identity_hom(SCALAR) for pair in gr.covering_pairs(L)}
        full = gr.complete_phi_by_chains(L, [SCALAR] * 4, partial)
        assert set(full) == set(L.comparable_pairs())
        spec = gr.GradedSpec(L, [SCALAR] * 4, full)
        gr.validate_spec(spec)

    def test_chain_composition(self):
        L = sl.chain(3)
        corner = fd.StarHom(SCALAR, M2, np.array([[1.0], [0], [0], [0]]))
        partial = {
            (1, 2): fd.identity_hom(SCALAR),
            (0, 1): corner,
        }
        full = gr.complete_phi_by_chains(L, [M2, SCALAR, SCALAR], partial)
        assert np.allclose(full[(0, 2)].matrix, corner.matrix)

    def test_path_dependence_detected(self):
        L = sl.diamond()
        corner = fd.StarHom(SCALAR, M2, np.array([[1.0], [0], [0], [0]]))
        partial = {
            (1, 3): fd.identity_hom(SCALAR),
            (2, 3): fd.identity_hom(SCALAR),
            (0, 1): unital_embedding(M2),
            (0, 2): corner,
        }
        with pytest.raises(gr.PathDependence):
            gr.complete_phi_by_chains(L, [M2, SCALAR, SCALAR, SCALAR], partial)

    def test_missing_cover_rejected(self):
        L = sl.chain(2)
        with pytest.raises(gr.MissingHom):
            gr.complete_phi_by_chains(L, [SCALAR, SCALAR], {})

    def test_provided_shortcut_checked(self):
        L = sl.chain(3)
        partial = {
            (0, 1): fd.identity_hom(SCALAR),
            (1, 2): fd.identity_hom(SCALAR),
            (0, 2): fd.StarHom(SCALAR, SCALAR, np.array([[0.0]])),
        }
        with pytest.raises(gr.PathDependence):
            gr.complete_phi_by_chains(L, [SCALAR] * 3, partial)


# ------------------------------------------------------- restriction

class TestRestrictSpec:
    def test_upper_pair_of_diamond(self, corpus):
        spec = corpus["all-scalar-diamond"]
        L = spec.L
        sub, remap = gr.restrict_spec(spec, {L.index_of("a"), L.index_of("1")})
        assert sub.L.n == 2
        assert sub.L.leq(0, 1)
        assert remap[L.index_of("a")] == 0

    def test_not_meet_closed_rejected(self, corpus):
        spec = corpus["all-scalar-diamond"]
        L = spec.L
        with pytest.raises(InputError):
            gr.restrict_spec(spec, {L.index_of("a"), L.index_of("b")})
