import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reconlab import codes
from reconlab.errors import AlistFormatError, DimensionError, DistributionError

import gf2_ref


class TestSyndrome:
    def test_hand_example(self):
        H = codes.ParityCheckMatrix.from_rows([[0, 1], [1, 2]], 3)
        assert codes.syndrome(H, [1, 0, 1]).tolist() == [1, 1]

    def test_zero_word(self, small_peg):
        u = np.zeros(small_peg.n_cols, dtype=np.uint8)
        assert not codes.syndrome(small_peg, u).any()

    def test_identity(self):
        H = codes.ParityCheckMatrix.from_rows([[0], [1], [2]], 3)
        assert codes.syndrome(H, [0, 1, 1]).tolist() == [0, 1, 1]

    def test_length_mismatch(self, worked_H):
        with pytest.raises(DimensionError):
            codes.syndrome(worked_H, [0, 1])

    def test_matches_dense_reference(self, small_peg):
        D = gf2_ref.dense(small_peg)
        rng = np.random.default_rng(0)
        for _ in range(20):
            u = rng.integers(0, 2, small_peg.n_cols).astype(np.uint8)
            assert np.array_equal(codes.syndrome(small_peg, u), gf2_ref.syndrome_dense(D, u))

    @given(st.integers(0, 2**24 - 1), st.integers(0, 2**24 - 1))
    def test_linearity(self, a, b):
        H = codes.ParityCheckMatrix.from_rows(
            [[0, 1, 4], [1, 2, 5], [0, 3, 5], [2, 3, 4], [0, 2], [1, 3, 4, 5]], 6)
        u = np.array([(a >> i) & 1 for i in range(6)], dtype=np.uint8)
        v = np.array([(b >> i) & 1 for i in range(6)], dtype=np.uint8)
        lhs = codes.syndrome(H, u ^ v)
        rhs = codes.syndrome(H, u) ^ codes.syndrome(H, v)
        assert np.array_equal(lhs, rhs)


class TestRestrictedSyndrome:
    def test_worked_example(self, worked_case):
        got = codes.restricted_syndrome(worked_case["H"], worked_case["u_hat"],
                                        worked_case["ebar"])
        assert got.tolist() == [1, 1, 1, 1]

    def test_full_restriction(self, worked_case):
        H, u = worked_case["H"], worked_case["u"]
        keep = np.arange(H.n_cols)
        assert np.array_equal(codes.restricted_syndrome(H, u, keep), codes.syndrome(H, u))

    def test_empty_restriction(self, worked_case):
        got = codes.restricted_syndrome(worked_case["H"], worked_case["u"], [])
        assert not got.any()

    def test_out_of_range(self, worked_case):
        with pytest.raises(ValueError):
            codes.restricted_syndrome(worked_case["H"], worked_case["u"], [99])

    @given(st.integers(0, 2**24 - 1), st.integers(0, 2**24 - 1))
    @settings(max_examples=40)
    def test_partition_property(self, word, mask):
        H = codes.ParityCheckMatrix.from_rows(
            [[0, 1, 4], [1, 2, 5], [0, 3, 5], [2, 3, 4]], 6)
        u = np.array([(word >> i) & 1 for i in range(6)], dtype=np.uint8)
        e = [i for i in range(6) if (mask >> i) & 1]
        ebar = [i for i in range(6) if not (mask >> i) & 1]
        combined = codes.restricted_syndrome(H, u, e) ^ codes.restricted_syndrome(H, u, ebar)
        assert np.array_equal(combined, codes.syndrome(H, u))


class TestRowWeights:
    def test_worked_example(self, worked_H):
        assert codes.row_weights_within(worked_H, [2, 4]).tolist() == [1, 1, 0, 2]

    def test_empty(self, worked_H):
        assert codes.row_weights_within(worked_H, []).tolist() == [0, 0, 0, 0]

    def test_all_columns(self, worked_H):
        got = codes.row_weights_within(worked_H, np.arange(6))
        assert np.array_equal(got, worked_H.row_degrees())


class TestMatrixValidation:
    def test_duplicate_column_in_row(self):
        with pytest.raises(ValueError, match="duplicate"):
            codes.ParityCheckMatrix.from_rows([[0, 0], [1, 2]], 3)

    def test_out_of_range_index(self):
        with pytest.raises(ValueError, match="out of range"):
            codes.ParityCheckMatrix.from_rows([[0, 5], [1, 2]], 3)

    def test_zero_degree_row(self):
        with pytest.raises(ValueError, match="degree 0"):
            codes.ParityCheckMatrix.from_rows([[0, 1], []], 2)

    def test_zero_degree_column(self):
        with pytest.raises(ValueError, match="column 2"):
            codes.ParityCheckMatrix.from_rows([[0, 1], [0, 1]], 3)

    def test_transpose_consistency(self, small_peg):
        H = small_peg
        edges_rows = {(m, int(n)) for m in range(H.n_rows) for n in H.row(m)}
        edges_cols = {(int(m), n) for n in range(H.n_cols) for m in H.col(n)}
        assert edges_rows == edges_cols


MINIMAL_ALIST = """3 2
2 2
1 2 1
2 2
1 0
1 2
2 0
1 2
2 3
"""


class TestAlist:
    def test_minimal_example(self):
        H = codes.load_alist(MINIMAL_ALIST)
        assert (H.n_rows, H.n_cols) == (2, 3)
        edges = {(m, int(n)) for m in range(2) for n in H.row(m)}
        assert edges == {(0, 0), (0, 1), (1, 1), (1, 2)}

    def test_round_trip(self, worked_H, small_peg):
        for H in (worked_H, small_peg):
            assert codes.load_alist(codes.save_alist(H)) == H

    def test_save_is_exact_text(self):
        H = codes.ParityCheckMatrix.from_rows([[0, 1], [1, 2]], 3)
        assert codes.save_alist(H) == MINIMAL_ALIST

    def test_zero_padding_ignored(self):
        unpadded = MINIMAL_ALIST.replace(" 0\n", "\n")
        assert codes.load_alist(unpadded) == codes.load_alist(MINIMAL_ALIST)

    @pytest.mark.parametrize("mutate, lineno", [
        (lambda t: t.replace("3 2", "3"), 1),
        (lambda t: t.replace("1 2 1", "1 2"), 3),
        (lambda t: t.replace("2 2\n1 0", "2 2\n9 0"), 5),
        (lambda t: t.replace("1 2 1", "1 x 1"), 3),
    ])
    def test_malformed_reports_line(self, mutate, lineno):
        with pytest.raises(AlistFormatError) as exc:
            codes.load_alist(mutate(MINIMAL_ALIST))
        assert exc.value.line == lineno

    def test_inconsistent_blocks(self):
        # column block says (0,0); row block omits it
        bad = "2 2\n1 2\n1 1\n2 1\n1\n2\n1 2\n1\n"
        with pytest.raises(AlistFormatError):
            codes.load_alist(bad)


class TestDegreeDistribution:
    def test_parse(self):
        d = codes.parse_dist_text("# comment\ncol 3 24\nrow 6 12\n")
        assert d.n_cols == 24 and d.n_rows == 12
        assert d.edge_count() == (72, 72)

    def test_unbalanced(self):
        with pytest.raises(DistributionError, match="disagree"):
            codes.parse_dist_text("col 3 10\nrow 6 4\n")

    def test_bad_line(self):
        with pytest.raises(DistributionError, match="line 1"):
            codes.parse_dist_text("cols 3 10\n")


class TestPeg:
    def test_degrees_realized_exactly(self):
        d = codes.DegreeDistribution(col_mult={3: 24}, row_mult={6: 12})
        H = codes.build_peg(d, 24, seed=0)
        assert (H.col_degrees() == 3).all()
        assert H.n_rows == 12

    def test_deterministic(self):
        d = codes.DegreeDistribution(col_mult={2: 30, 3: 30}, row_mult={3: 50})
        assert codes.build_peg(d, 60, seed=9) == codes.build_peg(d, 60, seed=9)
        assert codes.build_peg(d, 60, seed=9) != codes.build_peg(d, 60, seed=10)

    def test_no_four_cycles_at_n1000(self):
        d = codes.DegreeDistribution(col_mult={3: 1000}, row_mult={3: 200, 4: 600})
        H = codes.build_peg(d, 1000, seed=11)
        seen = set()
        for n in range(H.n_cols):
            rows = [int(m) for m in H.col(n)]
            for i in range(len(rows)):
                for j in range(i + 1, len(rows)):
                    pair = (rows[i], rows[j])
                    assert pair not in seen, f"columns share rows {pair}"
                    seen.add(pair)

    def test_infeasible(self):
        d = codes.DegreeDistribution(col_mult={5: 4}, row_mult={10: 2})
        with pytest.raises(DistributionError):
            codes.build_peg(d, 4, seed=0)

    def test_wrong_n(self):
        d = codes.DegreeDistribution(col_mult={3: 24}, row_mult={6: 12})
        with pytest.raises(DistributionError):
            codes.build_peg(d, 25, seed=0)
