import numpy as np
import pytest

from src.engine.errors import RangeError, ShapeMismatchError
from src.engine.lut import (
    build_lut_block, build_lut_dp, build_lut_naive, build_tables_dp, build_tables_naive,
    dp_op_count, make_m_mu, naive_op_count, reshape_input,
)


class TestMakeMMu:
    def test_mu_one(self):
        assert make_m_mu(1).signs.tolist() == [[-1], [1]]

    def test_mu_two(self):
        assert make_m_mu(2).signs.tolist() == [[-1, -1], [1, -1], [-1, 1], [1, 1]]

    def test_key_six(self):
        assert make_m_mu(4).signs[6].tolist() == [-1, 1, 1, -1]

    def test_out_of_range(self):
        with pytest.raises(RangeError):
            make_m_mu(17)


class TestSingleTable:
    def test_naive_small(self):
        assert build_lut_naive([1, 2]).tolist() == [-3, -1, 1, 3]

    def test_dp_small(self):
        assert build_lut_dp([1, 2]).tolist() == [-3, -1, 1, 3]

    def test_op_counts(self):
        assert dp_op_count(2) == 5
        assert naive_op_count(2) == 8

    @pytest.mark.parametrize('build', [build_lut_naive, build_lut_dp])
    def test_zero_input(self, build):
        assert not np.any(build(np.zeros(5)))

    @pytest.mark.parametrize('build', [build_lut_naive, build_lut_dp])
    def test_all_ones_extremes(self, build):
        table = build([1, 1, 1, 1])
        assert table[15] == 4
        assert table[0] == -4

    def test_complement_symmetry(self, rng):
        table = build_lut_dp(rng.standard_normal(4))
        assert table[9] == -table[6]

    @pytest.mark.parametrize('mu', range(1, 9))
    def test_dp_matches_naive(self, rng, mu):
        x = rng.standard_normal((50, mu))
        dp = build_tables_dp(x)
        naive = build_tables_naive(x)
        np.testing.assert_allclose(dp, naive, rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize('mu', range(1, 9))
    def test_second_half_is_exact_negation(self, rng, mu):
        dp = build_tables_dp(rng.standard_normal((10, mu)))
        half = 1 << (mu - 1)
        np.testing.assert_array_equal(dp[:, half:], -dp[:, half - 1::-1])

    def test_matches_oracle_definition(self, rng):
        x = rng.standard_normal(3)
        table = build_lut_dp(x)
        for k in range(8):
            expected = sum((1 if (k >> t) & 1 else -1) * x[t] for t in range(3))
            assert table[k] == pytest.approx(expected, rel=1e-12, abs=1e-12)


class TestLutBlock:
    def test_single_table_layouts_coincide(self, rng):
        tile = rng.standard_normal((1, 1, 4))
        a, _ = build_lut_block(tile, 4, layout='table-major')
        b, _ = build_lut_block(tile, 4, layout='key-major')
        assert a.tables == b.tables == 1
        np.testing.assert_array_equal(a.entries.ravel(), b.entries.ravel())

    def test_key_major_addresses(self, rng):
        block, _ = build_lut_block(rng.standard_normal((1, 4, 4)), 4, layout='key-major')
        flat = block.entries[0].ravel()
        for t in range(4):
            for k in range(16):
                assert block.address(t, k) == k * 4 + t
                assert flat[k * 4 + t] == block.table(0, t)[k]

    def test_table_major_addresses(self, rng):
        block, _ = build_lut_block(rng.standard_normal((1, 3, 2)), 2, layout='table-major')
        flat = block.entries[0].ravel()
        for t in range(3):
            for k in range(4):
                assert flat[block.address(t, k)] == block.table(0, t)[k]

    def test_every_table_matches_naive(self, rng):
        x = rng.standard_normal((5, 2))
        tile = reshape_input(x, 2)
        block, ops = build_lut_block(tile, 2, layout='key-major')
        assert block.tables == 6
        assert ops == 6 * dp_op_count(2)
        for g in range(3):
            for a in range(2):
                sub = np.zeros(2)
                live = x[2 * g:2 * g + 2, a]
                sub[:live.size] = live
                np.testing.assert_allclose(block.table(g, a), build_lut_naive(sub), rtol=1e-12)

    def test_layout_conversion(self, rng):
        block, _ = build_lut_block(rng.standard_normal((3, 4, 3)), 3, layout='table-major')
        converted = block.to_layout('key-major')
        assert converted.layout == 'key-major'
        assert sorted(converted.entries.ravel()) == sorted(block.entries.ravel())
        np.testing.assert_array_equal(converted.to_layout('table-major').entries, block.entries)
        keys = np.array([0, 7, 3])
        np.testing.assert_array_equal(converted.lookup(1, keys), block.lookup(1, keys))

    def test_float32_storage(self, rng):
        tile = rng.standard_normal((2, 2, 8))
        block, _ = build_lut_block(tile, 8, dtype=np.float32)
        assert block.entries.dtype == np.float32
        for g in range(2):
            for a in range(2):
                np.testing.assert_allclose(block.table(g, a), build_lut_naive(tile[g, a]),
                                           rtol=1e-6, atol=1e-6)

    def test_naive_builder_count(self, rng):
        _, ops = build_lut_block(rng.standard_normal((3, 2, 4)), 4, builder='naive')
        assert ops == 6 * 16 * 4

    def test_blocks_are_read_only(self, rng):
        block, _ = build_lut_block(rng.standard_normal((1, 1, 2)), 2)
        with pytest.raises(ValueError):
            block.entries[0, 0, 0] = 1.0

    def test_empty_tile(self):
        with pytest.raises(ShapeMismatchError):
            build_lut_block(np.zeros((0, 1, 4)), 4)

    def test_wrong_subvector_length(self):
        with pytest.raises(ShapeMismatchError):
            build_lut_block(np.zeros((1, 1, 3)), 4)
