import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reconlab import fixedpoint as fp
from reconlab.errors import ConfigError


class TestQuantize:
    def test_pi_in_w10(self):
        v = fp.quantize(3.14159, fp.W10)
        assert v.code == 101
        assert fp.to_real(v) == 3.15625

    def test_saturation(self):
        assert fp.quantize(1000.0, fp.W10).code == 511
        assert fp.quantize(-1000.0, fp.W10).code == -511

    def test_zero(self):
        assert fp.quantize(0.0, fp.W10).code == 0
        assert fp.quantize(0.0, fp.W12).code == 0

    def test_non_finite(self):
        for bad in (math.inf, -math.inf, math.nan):
            with pytest.raises(ValueError):
                fp.quantize(bad, fp.W10)

    def test_half_away_from_zero(self):
        # 0.046875 * 32 = 1.5 rounds away from zero in both directions
        assert fp.quantize(0.046875, fp.W10).code == 2
        assert fp.quantize(-0.046875, fp.W10).code == -2

    @given(st.floats(-20.0, 20.0))
    def test_array_matches_scalar(self, x):
        arr = fp.quantize_array(np.array([x]), fp.W10)
        assert arr[0] == fp.quantize(x, fp.W10).code

    @given(st.floats(-15.9, 15.9))
    def test_error_bound_inside_range(self, x):
        v = fp.quantize(x, fp.W10)
        assert abs(fp.to_real(v) - x) <= 2.0 ** -(fp.W10.frac_bits + 1)

    @given(st.floats(-40.0, 40.0), st.floats(-40.0, 40.0))
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert fp.quantize(lo, fp.W12).code <= fp.quantize(hi, fp.W12).code

    @given(st.floats(-100.0, 100.0))
    def test_quantize_idempotent(self, x):
        v = fp.quantize(x, fp.W10)
        assert fp.quantize(fp.to_real(v), fp.W10) == v


class TestToReal:
    def test_examples(self):
        assert fp.to_real(fp.FixedValue(101, fp.W10)) == 3.15625
        assert fp.to_real(fp.FixedValue(-511, fp.W10)) == -15.96875
        assert fp.to_real(fp.FixedValue(0, fp.W10)) == 0.0


class TestSaturatingOps:
    def test_positive_saturation(self):
        a = fp.FixedValue(300, fp.W10)
        assert fp.sat_add(a, a).code == 511

    def test_negative_saturation(self):
        a = fp.FixedValue(-300, fp.W10)
        assert fp.sat_add(a, a).code == -511

    def test_exact(self):
        assert fp.sat_add(fp.FixedValue(100, fp.W10), fp.FixedValue(-40, fp.W10)).code == 60
        assert fp.sat_sub(fp.FixedValue(100, fp.W10), fp.FixedValue(40, fp.W10)).code == 60

    def test_format_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            fp.sat_add(fp.FixedValue(1, fp.W10), fp.FixedValue(1, fp.W12))

    @given(st.integers(-511, 511), st.integers(-511, 511))
    def test_commutative_and_in_range(self, a, b):
        x, y = fp.FixedValue(a, fp.W10), fp.FixedValue(b, fp.W10)
        assert fp.sat_add(x, y) == fp.sat_add(y, x)
        assert abs(fp.sat_add(x, y).code) <= 511

    @given(st.integers(-511, 511))
    def test_zero_identity(self, a):
        x = fp.FixedValue(a, fp.W10)
        assert fp.sat_add(x, fp.FixedValue(0, fp.W10)) == x


class TestFormat:
    def test_presets(self):
        assert (fp.W10.total_bits, fp.W10.frac_bits, fp.W10.max_code) == (10, 5, 511)
        assert (fp.W12.total_bits, fp.W12.frac_bits, fp.W12.max_code) == (12, 7, 2047)
        assert fp.W10.max_value == 15.96875

    def test_parse(self):
        assert fp.parse_format("float") is None
        assert fp.parse_format("fixed:w=10,f=5") == fp.W10
        assert fp.parse_format(" FIXED:w=12,f=7 ") == fp.W12

    @pytest.mark.parametrize("bad", [
        "fixed", "fixed:w=10", "fixed:w=10,f=5,x=1", "fixed:w=a,f=5",
        "double", "fixed:w=5,f=5",
    ])
    def test_parse_rejects(self, bad):
        with pytest.raises(ConfigError):
            fp.parse_format(bad)

    def test_invalid_format(self):
        with pytest.raises(ValueError):
            fp.FixedFormat(4, 4)

    def test_code_out_of_range(self):
        with pytest.raises(ValueError):
            fp.FixedValue(512, fp.W10)
