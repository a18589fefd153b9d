import numpy as np
import pytest

from hypertorelli.corpus import load_corpus, random_smooth_spec, sample_rng
from hypertorelli.exact_arith import FieldConfig, Matrix, rank_array, rowspace_equal
from hypertorelli.jacobian import DomainError, jacobian_ring
from hypertorelli.polyring import (
    HypersurfaceSpec,
    monomial_basis,
    monomial_count,
    parse_poly,
    partial_derivative,
)
from hypertorelli.torelli import (
    Ambiguity,
    EncodedHypersurface,
    WFormatError,
    decode,
    encode,
    encoded_monomials,
    format_w,
    hypothesis_check,
    integrate,
    jacobian_equivalent,
    parse_w,
    read_w,
    recover_partials,
    write_w,
)

FP = FieldConfig.prime_field(10007)
Q = FieldConfig.rational()


def span_of_monomials(nvars, k, pick, field=FP):
    basis = monomial_basis(nvars, k)
    rows = [[1 if m == e else 0 for m in basis] for e in pick]
    return Matrix.from_rows(rows, field, cols=len(basis))


def pure_powers(nvars, k):
    out = []
    for i in range(nvars):
        e = [0] * nvars
        e[i] = k
        out.append(tuple(e))
    return out


def partials_matrix(spec):
    rows = [partial_derivative(spec.f, i).vector() for i in range(spec.nvars)]
    return np.vstack(rows)


def contains(big: Matrix, rows: np.ndarray) -> bool:
    return rank_array(np.vstack([big.entries, rows]), big.field) == big.rows


class TestEncode:
    def test_dimensions(self):
        assert encode(HypersurfaceSpec.fermat(4, 3, FP)).dim == 36
        assert encode(HypersurfaceSpec.fermat(3, 4, FP)).dim == 25

    def test_scaling_invariant(self):
        spec = load_corpus("random_d3_n4_0")[0]
        doubled = HypersurfaceSpec(spec.n, spec.d, spec.f.scale(2))
        assert encode(spec) == encode(doubled)

    def test_matches_jacobian_dims(self):
        spec = load_corpus("random_d4_n3_1")[0]
        enc = encode(spec)
        assert enc.dim == monomial_count(5, 4) - jacobian_ring(spec).dim(4)

    def test_singular(self):
        with pytest.raises(DomainError):
            encode(HypersurfaceSpec.parse("x0^2*x1", 2, 3, FP))

    def test_bad_width(self):
        with pytest.raises(ValueError):
            EncodedHypersurface(3, 4, FP, Matrix.zeros(1, 10, FP))


class TestRecovery:
    def test_fermat_partials_and_fiber(self):
        enc = encode(HypersurfaceSpec.fermat(4, 3, FP))
        P = recover_partials(enc)
        F = integrate(P, 6, 3)
        assert rowspace_equal(P, span_of_monomials(6, 2, pure_powers(6, 2)))
        assert rowspace_equal(F, span_of_monomials(6, 3, pure_powers(6, 3)))

    @pytest.mark.parametrize("name", ["random_d3_n4_1", "random_d4_n3_0", "random_d3_n3_2"])
    def test_generic_unique(self, name):
        spec = load_corpus(name)[0]
        enc = encode(spec)
        res = decode(enc)
        assert res.partials_space.rows == spec.nvars
        assert res.candidate_space.rows == 1
        assert res.ambiguity is Ambiguity.UNIQUE
        assert rowspace_equal(Matrix(res.representative.vector().reshape(1, -1), FP),
                              Matrix(spec.f.vector().reshape(1, -1), FP))

    @pytest.mark.parametrize("name", ["random_d3_n4_2", "random_d4_n4_1", "fermat_d4_n3"])
    def test_soundness(self, name):
        # the recovered spaces always contain the true partials and the true equation
        spec = load_corpus(name)[0]
        res = decode(encode(spec))
        assert contains(res.partials_space, partials_matrix(spec))
        assert contains(res.candidate_space, spec.f.vector().reshape(1, -1))

    def test_whole_space(self):
        nv, d = 4, 3
        full = EncodedHypersurface(d, 2, FP, Matrix.identity(monomial_count(nv, d), FP))
        assert recover_partials(full).rows == monomial_count(nv, d - 1)

    def test_zero_space_has_no_candidate(self):
        enc = EncodedHypersurface(3, 4, FP, Matrix.zeros(0, monomial_count(6, 3), FP))
        res = decode(enc)
        assert res.ambiguity is Ambiguity.NO_VALID_CANDIDATE and not res.validated

    def test_fermat_positive_dimensional(self):
        res = decode(encode(HypersurfaceSpec.fermat(4, 3, FP)), rng=sample_rng(3, 0))
        assert res.ambiguity is Ambiguity.POSITIVE_DIMENSIONAL_FIBER
        assert res.candidate_space.rows == 6 and res.validated
        assert encode(HypersurfaceSpec(4, 3, res.representative)) == encode(HypersurfaceSpec.fermat(4, 3, FP))

    def test_rational_field(self):
        text = "x0^3 + x1^3 + x2^3 + x3^3 + x4^3 + x0*x1*x2 - 2*x2*x3*x4"
        spec = HypersurfaceSpec.parse(text, 3, 3, Q)
        res = decode(encode(spec))
        assert res.ambiguity is Ambiguity.UNIQUE

    def test_permutation_covariance(self):
        spec = load_corpus("random_d3_n4_0")[0]
        perm = (2, 0, 5, 1, 4, 3)
        moved = HypersurfaceSpec(spec.n, spec.d, spec.f.permute(perm))
        rep = decode(encode(moved)).representative
        assert rowspace_equal(Matrix(rep.vector().reshape(1, -1), FP),
                              Matrix(spec.f.permute(perm).vector().reshape(1, -1), FP))


class TestEquivalence:
    def test_scalar(self):
        spec = load_corpus("random_d3_n4_2")[0]
        assert jacobian_equivalent(spec, HypersurfaceSpec(spec.n, spec.d, spec.f.scale(3)))

    def test_diagonal_weights(self):
        a = HypersurfaceSpec.fermat(4, 3, FP)
        b = HypersurfaceSpec.parse(" + ".join(f"{i + 1}*x{i}^3" for i in range(6)), 4, 3, FP)
        assert jacobian_equivalent(a, b)

    def test_perturbation(self):
        a = HypersurfaceSpec.fermat(4, 3, FP)
        b = HypersurfaceSpec(4, 3, a.f + parse_poly("x0*x1*x2", 6, FP))
        assert not jacobian_equivalent(a, b)


class TestHypotheses:
    @pytest.mark.parametrize(
        "d,n,fano,eligible",
        [(3, 4, True, True), (4, 3, True, True), (3, 3, True, False), (3, 2, True, False),
         (2, 4, True, False), (5, 3, False, False), (4, 4, True, True), (6, 5, True, True)],
    )
    def test_table(self, d, n, fano, eligible):
        rep = hypothesis_check(d, n)
        assert (rep.fano, rep.eligible) == (fano, eligible)
        assert rep.reason


class TestWFiles:
    def test_round_trip(self, tmp_path):
        for name in ["random_d3_n4_0", "fermat_d4_n3"]:
            enc = encode(load_corpus(name)[0])
            path = tmp_path / f"{name}.w"
            write_w(enc, path)
            assert read_w(path) == enc
            assert format_w(read_w(path)) == path.read_text()

    def test_rational_round_trip(self):
        enc = encode(HypersurfaceSpec.parse("x0^3 + x1^3 + x2^3 + x3^3 + 1/2*x0*x1*x2", 2, 3, Q))
        assert parse_w(format_w(enc)) == enc

    def test_labels(self):
        enc = encode(HypersurfaceSpec.fermat(2, 3, FP))
        assert len(encoded_monomials(enc)) == enc.W.cols == 20

    def header(self):
        return "TORELLI-W v1 d=2 n=0 field=p:7\n"

    def test_good_small(self):
        enc = parse_w(self.header() + "1 3\n1 0 6\n")
        assert enc.dim == 1

    @pytest.mark.parametrize(
        "text,line",
        [
            ("", 1),
            ("TORELLI-W v2 d=2 n=0 field=p:7\n1 3\n1 0 0\n", 1),
            ("TORELLI-W v1 d=x n=0 field=p:7\n1 3\n1 0 0\n", 1),
            ("TORELLI-W v1 d=2 n=0 field=p:8\n1 3\n1 0 0\n", 1),
            ("TORELLI-W v1 d=2 n=0 field=p:7\n1 4\n1 0 0 0\n", 2),
            ("TORELLI-W v1 d=2 n=0 field=p:7\n", 2),
            ("TORELLI-W v1 d=2 n=0 field=p:7\n2 3\n1 0 0\n", 4),
            ("TORELLI-W v1 d=2 n=0 field=p:7\n1 3\n1 0\n", 3),
            ("TORELLI-W v1 d=2 n=0 field=p:7\n2 3\n1 0 0\n0 9 0\n", 4),
            ("TORELLI-W v1 d=2 n=0 field=p:7\n1 3\n1 -1 0\n", 3),
            ("TORELLI-W v1 d=2 n=0 field=q\n1 3\n1 1/0 0\n", 3),
        ],
    )
    def test_errors_are_line_numbered(self, text, line):
        with pytest.raises(WFormatError) as info:
            parse_w(text)
        assert info.value.line == line
        assert str(info.value).startswith(f"line {line}:")


def test_decode_reproducible():
    spec = random_smooth_spec(3, 4, FP, seed=5).spec
    enc = encode(HypersurfaceSpec.fermat(4, 3, FP))
    a = decode(enc, rng=sample_rng(9, 0))
    b = decode(enc, rng=sample_rng(9, 0))
    assert a.representative == b.representative and a.attempts == b.attempts
    assert decode(encode(spec)).ambiguity is Ambiguity.UNIQUE

