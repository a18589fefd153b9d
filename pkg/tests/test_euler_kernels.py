import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypertorelli.euler_kernels import (
    Box,
    ContextError,
    Diag,
    KClass,
    SheafKClass,
    apply_kernel,
    beilinson_truncation_class,
    box,
    convolve,
    diag,
    euler_pairing,
    linkage_class,
    normalize_diag,
    p_class,
    q_class,
    test_family as family,
)

CTX = (3, 4)


def kclass(d, n, terms):
    return KClass(d, n, terms)


def small_class(d, n):
    sym = st.one_of(
        st.builds(Box, st.integers(-3, 5), st.integers(-3, 5)),
        st.builds(Diag, st.integers(-4, 6)),
    )
    return st.dictionaries(sym, st.integers(-3, 3), max_size=4).map(lambda t: KClass(d, n, t))


class TestConvolution:
    def test_diag_compose(self):
        assert convolve(diag(*CTX, 1), diag(*CTX, 2)) == diag(*CTX, 3)

    def test_box_box_fano(self):
        for d, n in [(3, 4), (4, 4), (3, 2)]:
            assert convolve(box(d, n, 0, 0), box(d, n, 0, 0)) == box(d, n, 0, 0)

    def test_q1_resolution(self):
        d, n = CTX
        q0 = q_class(d, n, 0)
        lhs = q0 @ diag(d, n, 1) @ q0
        rhs = diag(d, n, 1) - box(d, n, 1, 0) - box(d, n, 0, 1) + (n + 2) * box(d, n, 0, 0)
        assert lhs == rhs == q_class(d, n, 1)

    def test_context_mismatch(self):
        with pytest.raises(ContextError):
            convolve(diag(3, 4, 0), diag(4, 4, 0))

    @settings(max_examples=30, deadline=None)
    @given(small_class(*CTX), small_class(*CTX), small_class(*CTX))
    def test_associative(self, a, b, c):
        assert convolve(convolve(a, b), c) == convolve(a, convolve(b, c))

    @settings(max_examples=30, deadline=None)
    @given(small_class(*CTX), small_class(*CTX), st.integers(-3, 5))
    def test_functor_order(self, a, b, c):
        F = SheafKClass.line_bundle(*CTX, c)
        assert apply_kernel(convolve(a, b), F) == apply_kernel(b, apply_kernel(a, F))


class TestProjectors:
    def test_q0(self):
        assert q_class(*CTX, 0) == diag(*CTX, 0) - box(*CTX, 0, 0)

    def test_q0_idempotent_and_box_kills(self):
        q0 = q_class(*CTX, 0)
        assert q0 @ q0 == q0
        assert (box(*CTX, 0, 0) @ q0).is_zero()

    def test_p_single_object(self):
        assert p_class(4, 3, 0) == q_class(4, 3, 0)

    def test_p_two_objects(self):
        d, n = 3, 3
        expected = diag(d, n, 0) - box(d, n, 0, 0) - box(d, n, -1, 1) + (n + 2) * box(d, n, -1, 0)
        assert p_class(d, n, 0) == expected

    @pytest.mark.parametrize("d,n", [(4, 3), (3, 3), (3, 4), (3, 5), (4, 6)])
    def test_p0_idempotent_and_annihilating(self, d, n):
        p0 = p_class(d, n, 0)
        assert p0 @ p0 == p0
        for i in range(n - d + 2):
            assert apply_kernel(p0, SheafKClass.line_bundle(d, n, i)).is_zero()

    def test_reversed_order_fails_annihilation(self):
        # documents the convention: composing R_0 first then R_1 does not project
        d, n = 3, 3
        r = [diag(d, n, 0) - box(d, n, -j, j) for j in range(2)]
        wrong = r[0] @ r[1]
        assert apply_kernel(wrong, SheafKClass.line_bundle(d, n, 0)).is_zero()
        assert not apply_kernel(wrong, SheafKClass.line_bundle(d, n, 1)).is_zero()

    def test_non_fano(self):
        with pytest.raises(ContextError):
            p_class(5, 2, 0)

    def test_apply_examples(self):
        assert apply_kernel(q_class(*CTX, 0), SheafKClass.line_bundle(*CTX, 0)).is_zero()
        assert apply_kernel(diag(*CTX, 1), SheafKClass.line_bundle(*CTX, 2)) == SheafKClass.line_bundle(*CTX, 3)


class TestBeilinson:
    def test_small_cases(self):
        d, n = CTX
        assert beilinson_truncation_class(d, n, 0) == box(d, n, 0, 0)
        assert beilinson_truncation_class(d, n, 1) == box(d, n, 1, 0) + box(d, n, 0, 1) - (n + 2) * box(d, n, 0, 0)

    @pytest.mark.parametrize("d,n", [(3, 2), (3, 4), (4, 3), (5, 4), (6, 6)])
    def test_rotation_identity(self, d, n):
        for i in range(d):
            assert q_class(d, n, i) == diag(d, n, i) - beilinson_truncation_class(d, n, i)

    def test_range(self):
        with pytest.raises(ValueError):
            beilinson_truncation_class(3, 4, 7)


class TestPairing:
    def test_examples(self):
        assert euler_pairing(box(3, 4, 0, 0), diag(3, 4, 0)) == 1
        assert euler_pairing(diag(3, 2, 0), diag(3, 2, 0)) == 9
        for d, n in [(3, 4), (4, 3), (2, 2)]:
            assert euler_pairing(box(d, n, 0, 0), box(d, n, 0, 0)) == 1

    def test_serre_duality(self):
        rnd = random.Random(4)
        for d, n in [(3, 4), (4, 4), (3, 2), (5, 3)]:
            for _ in range(20):
                a, b, k = rnd.randint(-4, 4), rnd.randint(-4, 4), rnd.randint(-5, 5)
                lhs = euler_pairing(diag(d, n, k), box(d, n, a, b))
                rhs = euler_pairing(box(d, n, a, b), diag(d, n, k + 2 * (d - n - 2)))
                assert lhs == rhs

    def test_diag_self_pairing_matches_hochschild_euler(self):
        # chi(Delta, Delta) = (-1)^n e(X), and HH_* has Euler characteristic e(X)
        from hypertorelli.exact_arith import FieldConfig
        from hypertorelli.hodge import hochschild_homology
        from hypertorelli.polyring import HypersurfaceSpec

        for d, n in [(3, 2), (3, 4), (4, 3)]:
            hh = hochschild_homology(HypersurfaceSpec.fermat(n, d, FieldConfig.prime_field(10007)))
            assert euler_pairing(diag(d, n, 0), diag(d, n, 0)) == (-1) ** n * hh.euler


class TestNormalize:
    def test_window_unchanged(self):
        for k in range(3):
            assert normalize_diag(diag(*CTX, k)) == diag(*CTX, k)

    def test_linkage_rewrite_is_pure_box(self):
        d, n = CTX
        diff = normalize_diag(diag(d, n, d)) - diag(d, n, 0)
        assert diff.is_pure_box()
        for T in family(d, n):
            assert euler_pairing(T, diff) == euler_pairing(T, diag(d, n, d) - diag(d, n, 0))
            assert euler_pairing(diff, T) == euler_pairing(diag(d, n, d) - diag(d, n, 0), T)

    def test_linkage_class_pairs_like_the_difference(self):
        for d, n in [(3, 4), (4, 3), (3, 2)]:
            for k in range(-3, 6):
                rel = diag(d, n, k) - diag(d, n, k - d) - linkage_class(d, n, k)
                assert all(euler_pairing(T, rel) == 0 == euler_pairing(rel, T) for T in family(d, n))

    @settings(max_examples=40, deadline=None)
    @given(small_class(*CTX))
    def test_pairings_preserved(self, K):
        N = normalize_diag(K)
        for sym, _ in N.terms.items():
            if isinstance(sym, Diag):
                assert 0 <= sym.k < CTX[0]
            else:
                assert 0 <= sym.a <= CTX[1] + 1 and 0 <= sym.b <= CTX[1] + 1
        for T in family(*CTX):
            assert euler_pairing(T, K) == euler_pairing(T, N)
            assert euler_pairing(K, T) == euler_pairing(N, T)

    @settings(max_examples=20, deadline=None)
    @given(small_class(*CTX))
    def test_idempotent(self, K):
        N = normalize_diag(K)
        assert normalize_diag(N) == N


class TestRendering:
    def test_sorted_text(self):
        K = diag(*CTX, 1) - box(*CTX, 1, 0) + 2 * box(*CTX, 0, 1)
        assert str(K) == "2·Box(0,1) + -1·Box(1,0) + 1·Diag(1)"
        assert str(KClass.zero(*CTX)) == "0"

    def test_zero_terms_dropped(self):
        K = kclass(3, 4, {Box(0, 0): 0, Diag(1): 2})
        assert dict(K.terms) == {Diag(1): 2}
