import numpy as np
import pytest

from _oracles import hilbert_coefficient, naive_rank_mod_p
from hypertorelli.corpus import load_corpus, random_polynomial, sample_rng
from hypertorelli.exact_arith import FieldConfig, rank_array
from hypertorelli.jacobian import (
    DomainError,
    hh_action_witness,
    hilbert_oracle,
    hilbert_series,
    ideal_component,
    ideal_generators_array,
    is_smooth,
    jacobian_ring,
    pairing_rank,
    socle_degree,
)
from hypertorelli.polyring import HypersurfaceSpec, monomial_count, parse_poly

Q = FieldConfig.rational()
FP = FieldConfig.prime_field(10007)


def fermat(n, d, field=FP):
    return HypersurfaceSpec.fermat(n, d, field)


def test_socle_degree():
    assert socle_degree(3, 4) == 6
    assert socle_degree(4, 4) == 12
    assert socle_degree(2, 7) == 0


@pytest.mark.parametrize("d,n", [(2, 3), (3, 2), (3, 4), (4, 3), (4, 4), (5, 3), (6, 2)])
def test_hilbert_oracle_matches_inclusion_exclusion(d, n):
    sigma = socle_degree(d, n)
    assert len(hilbert_series(d, n)) == sigma + 1
    for k in range(sigma + 4):
        assert hilbert_oracle(d, n, k) == hilbert_coefficient(d, n, k)


def test_hilbert_examples():
    assert hilbert_oracle(3, 4, 3) == 20
    assert hilbert_oracle(4, 3, 4) == 45
    assert hilbert_oracle(4, 4, 13) == 0


class TestComponents:
    def test_fermat_cubic_fourfold(self):
        assert ideal_component(fermat(4, 3), 3).ring_dim == 20

    def test_degree_zero(self):
        assert ideal_component(fermat(4, 3), 0).ring_dim == 1

    def test_fermat_quartic(self):
        assert ideal_component(fermat(4, 4), 2).ring_dim == 21

    @pytest.mark.parametrize("name", ["random_d3_n4_0", "random_d4_n3_1", "random_d3_n2_2"])
    def test_ideal_basis_spans_generators(self, name):
        # the NF recursion must reproduce the span of x^a * partials computed head-on
        spec = load_corpus(name)[0]
        for k in range(spec.d - 1, spec.d + 2):
            comp = ideal_component(spec, k)
            gens = ideal_generators_array(spec, k)
            assert comp.ideal_dim == rank_array(gens, FP)
            assert rank_array(np.vstack([comp.ideal_basis.entries, gens]), FP) == comp.ideal_dim

    def test_naive_rank_cross_check(self):
        spec = load_corpus("random_d3_n2_0")[0]
        gens = ideal_generators_array(spec, 3)
        assert naive_rank_mod_p(gens.tolist(), 10007) == monomial_count(4, 3) - jacobian_ring(spec).dim(3)

    def test_below_first_ideal_degree(self):
        comp = ideal_component(fermat(4, 3), 1)
        assert comp.ideal_dim == 0 and comp.ring_dim == 6


class TestSmoothness:
    def test_fermat_rational(self):
        assert is_smooth(fermat(4, 3, Q))

    def test_singular_example(self):
        spec = HypersurfaceSpec.parse("x0^2*x1", 2, 3, FP)
        assert not is_smooth(spec)
        assert not is_smooth(spec, early_exit=False)

    def test_singular_dims_dominate_oracle(self):
        spec = HypersurfaceSpec.parse("x0^3 + x1^3 + x2^3 + x0*x1*x3", 2, 3, FP)
        ring = jacobian_ring(spec)
        sigma = socle_degree(3, 2)
        dims = ring.dims(sigma + 1)
        oracle = [hilbert_oracle(3, 2, k) for k in range(sigma + 2)]
        assert all(a >= b for a, b in zip(dims, oracle))
        assert dims != oracle

    def test_rational_and_prime_agree(self):
        text = "x0^3 + 2*x1^3 - x2^3 + 3*x3^3 + x0*x1*x2 - 5*x1*x2*x3"
        sq = HypersurfaceSpec.parse(text, 2, 3, Q)
        sp = HypersurfaceSpec.parse(text, 2, 3, FP)
        assert jacobian_ring(sq).dims(5) == jacobian_ring(sp).dims(5)

    @pytest.mark.parametrize("d,n", [(3, 2), (3, 4), (4, 3)])
    def test_random_smooth_dims(self, d, n):
        spec = HypersurfaceSpec(n, d, random_polynomial(n + 2, d, FP, sample_rng(11, 0)))
        sigma = socle_degree(d, n)
        dims = jacobian_ring(spec).dims(sigma + 1)
        assert dims == [hilbert_coefficient(d, n, k) for k in range(sigma + 2)]
        assert dims == dims[: sigma + 1][::-1] + [0]  # Gorenstein symmetry
        assert all(x > 0 for x in dims[: sigma + 1])


class TestPairing:
    def test_fermat_cubic(self):
        assert pairing_rank(fermat(4, 3), 3) == 20

    def test_degree_zero(self):
        assert pairing_rank(load_corpus("random_d3_n4_1")[0], 0) == 1

    def test_fermat_quartic(self):
        assert pairing_rank(fermat(4, 4), 2) == 21

    def test_singular_rejected(self):
        with pytest.raises(DomainError):
            pairing_rank(HypersurfaceSpec.parse("x0^2*x1", 2, 3, FP), 1)


class TestWitness:
    def test_fermat_monomial(self):
        spec = fermat(4, 3)
        xi = parse_poly("x0*x1*x2", 6, FP)
        eta, c = hh_action_witness(spec, xi)
        assert eta == parse_poly("x3*x4*x5", 6, FP)
        assert c != 0

    def test_f_is_in_its_own_ideal(self):
        spec = load_corpus("random_d3_n4_0")[0]
        with pytest.raises(DomainError, match="class is zero in J"):
            hh_action_witness(spec, spec.f)

    def test_random_classes(self):
        spec = load_corpus("random_d3_n4_2")[0]
        ring = jacobian_ring(spec)
        for s in range(10):
            xi = random_polynomial(6, 3, FP, sample_rng(5, s))
            if not np.any(ring.normal_form(xi)):
                continue
            eta, c = hh_action_witness(spec, xi)
            assert eta.degree == 3 and c != 0
            assert ring.normal_form(xi * eta)[0] == c
