import itertools

import numpy as np
import pytest

from levelset import FourierSupport, InputError, min_samples, rank_bound, shift_count


def brute_force_shift_count(inner, outer):
    """Independent oracle: enumerate every translate over a generous range."""
    outer_set = set(map(tuple, outer.elements.tolist()))
    span = int(np.abs(outer.elements).max() + np.abs(inner.elements).max() + 2)
    count = 0
    for shift in itertools.product(range(-span, span + 1), repeat=inner.dims):
        if all(
            tuple(k + s for k, s in zip(row, shift)) in outer_set
            for row in inner.elements.tolist()
        ):
            count += 1
    return count


class TestFourierSupport:
    def test_rect_odd_is_centered(self):
        s = FourierSupport.rect(3)
        assert s.elements.ravel().tolist() == [-1, 0, 1]

    def test_rect_even_keeps_extra_negative(self):
        s = FourierSupport.rect(4)
        assert s.elements.ravel().tolist() == [-2, -1, 0, 1]

    def test_rect_count_and_lexicographic_order(self):
        s = FourierSupport.rect(3, 5)
        assert s.size == 15
        rows = [tuple(r) for r in s.elements.tolist()]
        assert rows == sorted(rows)

    def test_ball_matches_distance_oracle(self):
        s = FourierSupport.ball(2.5, 2)
        expected = {
            (a, b)
            for a in range(-3, 4)
            for b in range(-3, 4)
            if a * a + b * b <= 2.5**2
        }
        assert set(map(tuple, s.elements.tolist())) == expected

    def test_explicit_rejects_duplicates(self):
        with pytest.raises(InputError):
            FourierSupport.explicit([[0, 0], [0, 0]])

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            FourierSupport.explicit(np.empty((0, 2), dtype=int))

    def test_center_and_reflection(self):
        s = FourierSupport.rect(3, 3)
        assert np.all(s.center == 0)
        refl = s.reflection_indices
        assert np.array_equal(s.elements[refl], -s.elements)
        assert s.is_origin_symmetric

    def test_even_rect_reflects_about_half_integer_center(self):
        s = FourierSupport.rect(2, 2)
        assert np.all(s.center == -0.5)
        refl = s.reflection_indices
        assert np.array_equal(s.elements[refl], -1 - s.elements)
        assert not s.is_origin_symmetric

    def test_reflection_failure_for_lopsided_set(self):
        s = FourierSupport.explicit([[0, 0], [1, 0], [2, 1]])
        with pytest.raises(InputError):
            s.reflection_indices

    def test_index_of(self):
        s = FourierSupport.rect(5, 5)
        for i, row in enumerate(s.elements):
            assert s.index_of(row) == i
        with pytest.raises(InputError):
            s.index_of([7, 7])


class TestShiftCount:
    def test_equal_supports_have_one_shift(self):
        s = FourierSupport.rect(3, 3)
        assert shift_count(s, s) == 1

    def test_three_in_eleven(self):
        assert shift_count(FourierSupport.rect(3, 3), FourierSupport.rect(11, 11)) == 81

    def test_singleton_in_l_by_l(self):
        for ell in (2, 5, 8):
            assert shift_count(
                FourierSupport.rect(1, 1), FourierSupport.rect(ell, ell)
            ) == ell * ell

    def test_inner_larger_rejected(self):
        with pytest.raises(InputError):
            shift_count(FourierSupport.rect(5, 5), FourierSupport.rect(3, 3))

    @pytest.mark.parametrize("sizes", [((3, 3), (5, 5)), ((2, 3), (4, 6)), ((1, 2), (3, 3))])
    def test_rect_formula_matches_enumeration(self, sizes):
        (k1, k2), (l1, l2) = sizes
        inner = FourierSupport.rect(k1, k2)
        outer = FourierSupport.rect(l1, l2)
        fast = shift_count(inner, outer)
        slow = shift_count(inner, FourierSupport.explicit(outer.elements))
        assert fast == slow == brute_force_shift_count(inner, outer)

    def test_ball_in_rect_enumeration(self):
        inner = FourierSupport.ball(1.0, 2)
        outer = FourierSupport.rect(5, 5)
        assert shift_count(inner, outer) == brute_force_shift_count(inner, outer)


class TestRankBound:
    def test_three_in_five(self):
        assert rank_bound(FourierSupport.rect(3, 3), FourierSupport.rect(5, 5)) == 16

    def test_equal_supports(self):
        g = FourierSupport.rect(4, 4)
        assert rank_bound(g, g) == g.size - 1

    def test_three_in_eleven(self):
        assert rank_bound(FourierSupport.rect(3, 3), FourierSupport.rect(11, 11)) == 40


class TestMinSamples:
    def test_square_single_factor(self):
        b = min_samples(None, (3, 3))
        assert b.total_bound == 36
        assert b.total_min == 37
        assert b.per_factor_bound == (36,)

    def test_rectangular_single_factor(self):
        b = min_samples([(2, 3)], (2, 3))
        assert b.per_factor_bound == (25,)
        assert b.per_factor_min == (26,)

    def test_two_factor_total(self):
        b = min_samples([(1, 1), (1, 1)], (2, 2))
        assert b.total_bound == 24
        assert b.total_min == 25

    def test_oversized_support_raises_the_multiplier(self):
        b = min_samples(None, (3, 3), gamma_bandwidth=(11, 11))
        assert b.total_bound == (11 + 11) * (3 + 3)
        assert b.per_factor_bound == (132,)

    def test_oversized_support_must_contain_bandwidth(self):
        with pytest.raises(InputError):
            min_samples(None, (5, 5), gamma_bandwidth=(3, 3))

    def test_bad_bandwidth_rejected(self):
        with pytest.raises(InputError):
            min_samples(None, (0, 3))
