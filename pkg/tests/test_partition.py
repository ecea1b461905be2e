import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpaforge.adders import AdderKind
from cpaforge.multiplier import build_front_end
from cpaforge.partition import (
    DegenerateProfile,
    PartitionError,
    RegionPartition,
    closed_form_partition,
    compare_table,
    detect_regions,
    recommend,
)
from cpaforge.timing import ArrivalProfile, DelayModel, cpa_input_profile

R, BS, BL = AdderKind.RCA, AdderKind.BCSLA, AdderKind.BCLA


def test_trapezoid():
    p = detect_regions(ArrivalProfile(5, [0, 1, 2, 3, 3, 3, 3, 2, 1, 0]), 0)
    assert (p.r1, p.r2, p.r3) == ((0, 2), (3, 6), (7, 9))


def _measured_n8():
    # rising over bits 0..5, flat 6..14, drop at bit 15
    return ArrivalProfile(8, [0, 1, 2, 3, 4, 5, 6] + [6] * 8 + [0])


def test_n8_boundaries_merge_last_bit():
    p = detect_regions(_measured_n8(), 0)
    assert (p.r1, p.r2, p.r3) == ((0, 5), (6, 15), (16, 15))
    assert p.widths == (6, 10, 0)


def test_lone_flat_inside_rise_tolerated():
    p = detect_regions(ArrivalProfile(4, [0, 1, 1, 2, 3, 3, 3, 0]), 0)
    assert p.r1 == (0, 3)
    p = detect_regions(ArrivalProfile(4, [0, 1, 1, 1, 2, 3, 2, 0]), 0)
    assert p.r1 == (0, 0)


def test_rising_profile_is_degenerate():
    with pytest.raises(DegenerateProfile):
        detect_regions(ArrivalProfile(4, list(range(8))), 0.5)


def test_detect_errors():
    with pytest.raises(PartitionError):
        detect_regions(ArrivalProfile(1, [0, 1]), 0)
    with pytest.raises(PartitionError):
        detect_regions(_measured_n8(), -1)


@pytest.mark.parametrize(
    "n,widths,ranges",
    [
        (8, (4, 10, 2), ((0, 3), (4, 13), (14, 15))),
        (16, (8, 20, 4), ((0, 7), (8, 27), (28, 31))),
        (32, (16, 40, 8), ((0, 15), (16, 55), (56, 63))),
        (64, (32, 80, 16), ((0, 31), (32, 111), (112, 127))),
    ],
)
def test_closed_form_table(n, widths, ranges):
    p = closed_form_partition(n)
    assert p.widths == widths
    assert (p.r1, p.r2, p.r3) == ranges


@given(st.integers(4, 5000))
def test_closed_form_sums(n):
    p = closed_form_partition(n)
    assert sum(p.widths) == 2 * n and min(p.widths) >= 0
    if n & (n - 1) == 0:
        assert p.widths == (n // 2, 5 * n // 4, n // 4)


def test_closed_form_small_n():
    assert closed_form_partition(4).widths == (2, 5, 1)
    assert closed_form_partition(7).widths == (3, 8, 3)
    with pytest.raises(PartitionError):
        closed_form_partition(3)


def test_partition_validation():
    with pytest.raises(PartitionError):
        RegionPartition(4, (0, 2), (4, 5), (6, 7))
    with pytest.raises(PartitionError):
        RegionPartition.from_widths(4, (2, 2, 2))
    p = closed_form_partition(16)
    assert RegionPartition.from_dict(p.to_dict()) == p


def test_recommend():
    assert recommend(closed_form_partition(16), 16).kinds == (R, BS, BL)
    rec8 = recommend(closed_form_partition(8), 8)
    assert rec8.kinds == (R, BL) and rec8.widths == (4, 12)
    two = RegionPartition.from_widths(8, (6, 10, 0))
    assert recommend(two).kinds == (R, BL)
    assert recommend(RegionPartition.from_widths(16, (8, 23, 1))).widths == (8, 24)


def test_recommend_single_region(caplog):
    rec = recommend(RegionPartition.from_widths(8, (0, 16, 0)))
    assert rec.kinds == (R,)
    assert "falling back" in caplog.text


def test_compare_identical():
    p = closed_form_partition(16)
    rep = compare_table(None, p, p)
    assert rep["offsets"] == {"r1_end": 0, "r2_end": 0}
    assert rep["width_deltas"] == [0, 0, 0]


def test_compare_measured_vs_closed_form_n16():
    measured = RegionPartition(16, (0, 6), (7, 29), (30, 31))
    rep = compare_table(None, measured, closed_form_partition(16))
    assert rep["offsets"]["r1_end"] == 1


def test_compare_n_mismatch():
    with pytest.raises(PartitionError):
        compare_table(None, closed_form_partition(8), closed_form_partition(16))


@given(st.floats(0.1, 100), st.sampled_from([0.5, 1.5, 2.5, 3.7]))
def test_detect_scale_invariant(scale, eps):
    base = cpa_input_profile(build_front_end(8))
    scaled = ArrivalProfile(8, [scale * a for a in base.arrivals])
    assert detect_regions(scaled, eps * scale) == detect_regions(base, eps)


@given(st.integers(-6, 6))
def test_detect_scale_invariant_on_grid(k):
    # steps equal to epsilon stay exact under power-of-two scaling
    base = cpa_input_profile(build_front_end(16))
    eps = DelayModel().flat_tolerance
    scaled = ArrivalProfile(16, [a * 2.0**k for a in base.arrivals])
    assert detect_regions(scaled, eps * 2.0**k) == detect_regions(base, eps)


@pytest.mark.parametrize("n", [8, 16, 32, 64])
def test_pipeline_profiles_give_valid_partitions(n):
    prof = cpa_input_profile(build_front_end(n))
    for eps in (0.0, 1.0, 2.0, 3.0):
        p = detect_regions(prof, eps)
        assert sum(p.widths) == 2 * n
