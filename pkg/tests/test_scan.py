"""Tests for ptspectra.families and ptspectra.scan — continuation, certificates, thresholds."""

import math

import numpy as np
import pytest

from ptspectra.closed_forms import TwoLevelGainCoupling, eig_gain_coupling
from ptspectra.errors import (
    BracketError,
    ConvergenceError,
    InvalidInputError,
    MatchingAmbiguityError,
)
from ptspectra.families import (
    DetunedFamily,
    GainCouplingFamily,
    H2Family,
    H3Family,
    continuity_defect,
)
from ptspectra.hamiltonians import ModelH2, ModelH3, build_gain_coupling
from ptspectra.scan import (
    ScanConfig,
    certified_range,
    certify_levels,
    certify_reality,
    locate_threshold,
    match_step,
    scan,
    truncation_convergence,
)

GAIN_GRID = [round(0.05 * k, 12) for k in range(31)]


@pytest.fixture
def gain():
    return GainCouplingFamily(0.0, 2.0)


def _two_level(**kw):
    kw.setdefault("track_count", 2)
    return ScanConfig(**kw)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

class TestFamilies:

    def test_h3_levels_and_doubling(self):
        fam = H3Family()
        assert fam.unperturbed_levels(3) == [((0,), 1.0), ((1,), 3.0), ((2,), 5.0)]
        assert fam.doubled(64) == 128
        assert fam.normalize_size(None) == 128

    def test_h3_holds_model(self):
        fam = H3Family(quad_order=48)
        assert fam.model == ModelH3(48)
        assert fam.quad_order == 48
        assert fam.describe()["quad_order"] == 48

    def test_h3_rejects_bad_size(self):
        with pytest.raises(InvalidInputError):
            H3Family().normalize_size(0)

    def test_h3_rejects_out_of_range_eps(self):
        with pytest.raises(InvalidInputError):
            H3Family().validate_eps(1.0)

    def test_h2_levels_sorted_with_label_ties(self):
        fam = H2Family(ModelH2(1.0, 2.0))
        levels = fam.unperturbed_levels((3, 3))
        assert levels[:4] == [((0, 0), 3.0), ((1, 0), 5.0), ((0, 1), 7.0), ((2, 0), 7.0)]

    def test_h2_doubling_grows_each_axis_by_sqrt2(self):
        fam = H2Family(ModelH2(1.0, 2.0))
        assert fam.doubled((16, 16)) == (23, 23)
        assert fam.normalize_size(8) == (8, 8)

    def test_h2_rejects_bad_size(self):
        with pytest.raises(InvalidInputError):
            H2Family(ModelH2(1.0, 2.0)).normalize_size((4, 0))

    def test_two_level_labels_follow_energy(self):
        fam = GainCouplingFamily(2.0, 0.0)
        assert fam.unperturbed_levels(2) == [((0,), 0.0), ((1,), 2.0)]
        assert fam.doubled(2) == 2

    def test_continuity_defect_zero_at_zero(self):
        assert continuity_defect(H3Family(), 0.0, 8, 3) == 0.0

    def test_continuity_defect_shrinks_with_eps(self):
        fam = H2Family(ModelH2(1.0, 2.0))
        big = continuity_defect(fam, 1e-2, (6, 6), 4)
        small = continuity_defect(fam, 1e-4, (6, 6), 4)
        assert small < big
        assert small == pytest.approx(1e-2 * big, rel=1e-9)


# ---------------------------------------------------------------------------
# ScanConfig and matching
# ---------------------------------------------------------------------------

class TestScanConfig:

    def test_default_is_valid(self):
        assert ScanConfig().validate().track_count == 5

    def test_non_monotone_grid(self):
        with pytest.raises(InvalidInputError, match="monotone"):
            ScanConfig(eps_grid=[0.0, 0.2, 0.1]).validate()

    def test_empty_grid(self):
        with pytest.raises(InvalidInputError):
            ScanConfig(eps_grid=[]).validate()

    @pytest.mark.parametrize("name", ["reality_tol", "match_tol", "path_step"])
    def test_non_positive_tolerances(self, name):
        with pytest.raises(InvalidInputError, match=name):
            ScanConfig(**{name: 0.0}).validate()

    def test_relative_reality(self):
        cfg = ScanConfig(reality_tol=1e-8)
        assert cfg.is_real(100.0 + 5e-7j)
        assert not cfg.is_real(1.0 + 5e-7j)

    def test_zero_workers_means_cpu_count(self):
        assert ScanConfig(workers=0).max_workers() >= 1
        assert ScanConfig(workers=3).max_workers() == 3

    @pytest.mark.parametrize("ratio", [-0.1, 1.0, float("nan")])
    def test_jump_ratio_range(self, ratio):
        with pytest.raises(InvalidInputError, match="jump_ratio"):
            ScanConfig(jump_ratio=ratio).validate()


class TestMatchStep:

    def test_nearest_neighbour(self):
        idx = match_step(np.array([0.0, 1.0]), np.array([1.1, 0.1]), 1.0)
        assert idx.tolist() == [1, 0]

    def test_collision_resolved_by_assignment(self):
        idx = match_step(np.array([0.0, 0.1]), np.array([0.06, 1.0]), 1.0)
        assert idx.tolist() == [0, 1]

    def test_no_candidate_within_tolerance(self):
        with pytest.raises(MatchingAmbiguityError):
            match_step(np.array([0.0]), np.array([5.0]), 1.0)

    def test_unresolvable_collision(self):
        with pytest.raises(MatchingAmbiguityError):
            match_step(np.array([0.0, 0.1]), np.array([0.05, 3.0]), 1.0)


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

class TestScan:

    def test_gain_matches_closed_form(self, gain):
        trajs = scan(gain, _two_level(eps_grid=GAIN_GRID))
        assert [t.label for t in trajs] == [(0,), (1,)]
        for k, eps in enumerate(GAIN_GRID):
            if abs(eps - 1.0) < 0.02:
                continue
            plus, minus = eig_gain_coupling(TwoLevelGainCoupling(0.0, 2.0, eps))
            got = sorted((trajs[0].points[k].value, trajs[1].points[k].value), key=lambda z: (z.real, z.imag))
            want = sorted((plus, minus), key=lambda z: (z.real, z.imag))
            assert abs(got[0] - want[0]) < 1e-12
            assert abs(got[1] - want[1]) < 1e-12
            assert trajs[0].points[k].real_flag == (eps < 1.0)

    def test_gain_lower_level_follows_lower_branch(self, gain):
        trajs = scan(gain, _two_level(eps_grid=GAIN_GRID))
        for p in trajs[0].points:
            if p.eps < 0.98:
                assert p.value.real == pytest.approx(1.0 - math.sqrt(1.0 - p.eps ** 2), abs=1e-12)

    def test_points_in_grid_order(self, gain):
        grid = [0.3, 0.2, 0.1, 0.0, -0.1]
        trajs = scan(gain, _two_level(eps_grid=grid))
        assert trajs[0].eps.tolist() == grid

    def test_h3_unperturbed_levels(self):
        trajs = scan(H3Family(), ScanConfig(eps_grid=[0.0], truncation=16))
        assert [t.points[0].value for t in trajs] == [1, 3, 5, 7, 9]
        assert all(t.points[0].residual == 0.0 for t in trajs)
        assert all(t.points[0].real_flag for t in trajs)

    def test_h3_low_levels_stay_real(self):
        trajs = scan(H3Family(), ScanConfig(eps_grid=[0.0, 0.1, 0.2], truncation=32))
        for t in trajs:
            assert all(t.reality_flags)
        assert np.all(np.diff(trajs[0].values.real) > 0)

    def test_reversed_grid_gives_same_points(self):
        cfg = dict(truncation=16, track_count=3)
        fwd = scan(H3Family(), ScanConfig(eps_grid=[0.0, 0.1, 0.2], **cfg))
        rev = scan(H3Family(), ScanConfig(eps_grid=[0.2, 0.1, 0.0], **cfg))
        for a, b in zip(fwd, rev):
            assert a.label == b.label
            assert np.array_equal(a.values, b.values[::-1])

    def test_threads_do_not_change_results(self, gain):
        one = scan(gain, _two_level(eps_grid=GAIN_GRID, workers=1))
        many = scan(gain, _two_level(eps_grid=GAIN_GRID, workers=4))
        for a, b in zip(one, many):
            assert np.array_equal(a.values, b.values)

    def test_too_many_tracked_levels(self, gain):
        with pytest.raises(InvalidInputError, match="cannot track"):
            scan(gain, ScanConfig(eps_grid=[0.0, 0.1], track_count=5))

    def test_h3_eps_out_of_range(self):
        with pytest.raises(InvalidInputError):
            scan(H3Family(), ScanConfig(eps_grid=[0.0, 1.2], truncation=8))

    def test_h2_scan_labels(self):
        fam = H2Family(ModelH2(1.0, 2.0))
        trajs = scan(fam, ScanConfig(eps_grid=[0.0, 0.1], truncation=(8, 8), track_count=3))
        assert [t.label for t in trajs] == [(0, 0), (1, 0), (0, 1)]
        assert trajs[0].truncation == (8, 8)


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------

class TestCertify:

    def test_h3_ground_state_at_zero(self):
        cert = certify_reality(H3Family(), (0,), 0.0, ScanConfig(truncation=16))
        assert cert.real
        assert cert.value == 1.0
        assert cert.reference_truncation == (32,)
        assert cert.doubling_shift == 0.0

    def test_gain_complex_past_threshold(self, gain):
        cert = certify_reality(gain, (0,), 1.5, _two_level())
        assert not cert.real
        assert cert.value.real == pytest.approx(1.0, abs=1e-12)
        assert abs(cert.im_part) == pytest.approx(math.sqrt(1.25), abs=1e-12)

    def test_gain_real_below_threshold(self, gain):
        cert = certify_reality(gain, (1,), 0.6, _two_level())
        assert cert.real
        assert cert.value.real == pytest.approx(1.8, abs=1e-12)

    def test_small_truncation_fails_doubling_check(self):
        with pytest.raises(ConvergenceError) as info:
            certify_reality(H3Family(), (0,), 0.5, ScanConfig(truncation=4))
        assert info.value.eps == 0.5

    def test_unknown_label(self, gain):
        with pytest.raises(InvalidInputError, match="unknown level"):
            certify_reality(gain, (7,), 0.1, _two_level())

    def test_certified_range(self, gain):
        grid = [-1.25, -0.95, -0.5, 0.0, 0.5, 0.95, 1.25]
        assert certified_range(gain, (0,), grid, _two_level()) == (-0.95, 0.95)

    def test_certified_range_needs_zero(self, gain):
        with pytest.raises(InvalidInputError):
            certified_range(gain, (0,), [0.1, 0.2], _two_level())


class TestCertifyLevels:

    def test_levels_in_given_order(self, gain):
        certs = certify_levels(gain, [(1,), (0,)], 0.6, _two_level())
        assert [c.label for c in certs] == [(1,), (0,)]
        assert certs[0].value.real == pytest.approx(1.8, abs=1e-12)
        assert certs[1].value.real == pytest.approx(0.2, abs=1e-12)
        assert all(c.real for c in certs)

    def test_matches_single_level_certificates(self, gain):
        joint = certify_levels(gain, [(0,), (1,)], 0.6, _two_level())
        single = [certify_reality(gain, lb, 0.6, _two_level()) for lb in [(0,), (1,)]]
        assert [c.value for c in joint] == [c.value for c in single]

    def test_clear_cut_walk_jumps(self, gain, memory_sink):
        certify_levels(gain, [(0,), (1,)], 0.6, _two_level())
        # eps = 0, the midpoint and the target
        assert memory_sink.names().count("eigenvalues") == 3

    def test_zero_jump_ratio_steps(self, gain, memory_sink):
        certs = certify_levels(gain, [(0,), (1,)], 0.6, _two_level(jump_ratio=0.0))
        assert memory_sink.names().count("eigenvalues") > 20
        assert certs[0].value.real == pytest.approx(0.2, abs=1e-12)

    def test_no_jump_across_complex_pair(self, gain):
        cert = certify_levels(gain, [(1,)], 1.5, _two_level())[0]
        assert not cert.real
        assert cert.value.real == pytest.approx(1.0, abs=1e-12)

    def test_h2_levels_share_one_walk(self):
        fam = H2Family(ModelH2(1.0, math.sqrt(2.0)))
        labels = [lb for lb, _ in fam.unperturbed_levels((6, 6))[:2]]
        cfg = ScanConfig(truncation=(6, 6), reference_truncation=(10, 10), reality_tol=1e-6)
        certs = certify_levels(fam, labels, 0.1, cfg)
        assert [c.label for c in certs] == [(0, 0), (1, 0)]
        for c in certs:
            assert c.real
            assert c.truncation == (6, 6)
            assert c.reference_truncation == (10, 10)
            assert c.doubling_shift <= 1e-5

    def test_duplicate_labels(self, gain):
        with pytest.raises(InvalidInputError, match="distinct"):
            certify_levels(gain, [(0,), (0,)], 0.6, _two_level())

    def test_no_labels(self, gain):
        with pytest.raises(InvalidInputError):
            certify_levels(gain, [], 0.6, _two_level())


# ---------------------------------------------------------------------------
# Thresholds
# ---------------------------------------------------------------------------

class TestLocateThreshold:

    def test_gain_threshold(self, gain):
        report = locate_threshold(gain, ((0,), (1,)), (0.5, 1.5), 1e-8, _two_level())
        assert abs(report.eps_star - 1.0) <= 1e-8
        assert report.uncertainty <= 1e-8
        assert report.side == 1
        assert report.max_imag > 0
        assert report.gap_history[0][0] == 0.5

    def test_negative_side(self, gain):
        report = locate_threshold(gain, ((0,), (1,)), (-0.5, -1.5), 1e-8, _two_level())
        assert abs(report.eps_star + 1.0) <= 1e-8
        assert report.side == -1

    def test_detuned_threshold(self):
        fam = DetunedFamily(0.0, 1.0)
        report = locate_threshold(fam, ((0,), (1,)), (0.2, 1.4), 1e-8, _two_level())
        assert abs(report.eps_star - 1.0) <= 1e-8

    def test_random_gain_pairs(self, rng):
        for _ in range(10):
            e1, e2 = rng.uniform(-2.0, 2.0, size=2)
            if abs(e1 - e2) < 0.2:
                continue
            fam = GainCouplingFamily(float(e1), float(e2))
            star = 0.5 * abs(e1 - e2)
            report = locate_threshold(fam, ((0,), (1,)), (0.5 * star, 1.5 * star), 1e-8, _two_level())
            assert abs(report.eps_star - star) <= 1e-8

    def test_both_ends_real(self, gain):
        with pytest.raises(BracketError, match="both ends"):
            locate_threshold(gain, ((0,), (1,)), (0.1, 0.5), 1e-8, _two_level())

    def test_swapped_ends(self, gain):
        with pytest.raises(BracketError, match="must be real"):
            locate_threshold(gain, ((0,), (1,)), (1.5, 0.5), 1e-8, _two_level())

    def test_coinciding_ends(self, gain):
        with pytest.raises(BracketError):
            locate_threshold(gain, ((0,), (1,)), (0.5, 0.5), 1e-8, _two_level())

    def test_bad_tolerance(self, gain):
        with pytest.raises(InvalidInputError):
            locate_threshold(gain, ((0,), (1,)), (0.5, 1.5), 0.0, _two_level())

    def test_reference_disagrees_near_threshold(self):
        fam = _DriftingGain()
        with pytest.raises(ConvergenceError, match="near the threshold") as info:
            locate_threshold(fam, ((0,), (1,)), (0.5, 1.5), 1e-6, _two_level())
        assert info.value.truncation == "3"
        assert abs(info.value.eps - 1.0) <= 2e-6

    def test_drifting_threshold_without_reference_check(self):
        report = locate_threshold(
            _DriftingGain(), ((0,), (1,)), (0.5, 1.5), 1e-6, _two_level(check_truncation=False)
        )
        assert abs(report.eps_star - 1.0) <= 1e-6


class _DriftingGain(GainCouplingFamily):
    """Gain pair whose splitting grows with the size: threshold 1.0 at size 2,
    1.2 at its reference size 3."""

    def __init__(self) -> None:
        super().__init__(0.0, 2.0)

    def normalize_size(self, size):
        return 2 if size is None else int(size)

    def doubled(self, size):
        return 3

    def build(self, eps, size=2):
        e2 = 2.0 if size == 2 else 2.4
        return build_gain_coupling(TwoLevelGainCoupling(0.0, e2, 0.0), eps)


# ---------------------------------------------------------------------------
# Truncation convergence
# ---------------------------------------------------------------------------

class TestTruncationConvergence:

    def test_h3_unperturbed_is_exact(self):
        table = truncation_convergence(H3Family(), 0.0, [8, 16, 32], 3)
        assert table.sizes == [(8,), (16,), (32,)]
        for label in [(0,), (1,), (2,)]:
            assert table.differences(label) == [0.0, 0.0]
        assert table.non_monotone() == []

    def test_values_per_level(self):
        table = truncation_convergence(H3Family(), 0.0, [8, 16], 2)
        assert table.values[(1,)] == [3.0, 3.0]

    def test_sizes_must_increase(self):
        with pytest.raises(InvalidInputError, match="strictly increasing"):
            truncation_convergence(H3Family(), 0.0, [16, 8], 2)

    def test_as_dict(self):
        d = truncation_convergence(H3Family(), 0.0, [4, 8], 1).as_dict()
        assert d["sizes"] == [[4], [8]]
        assert d["levels"]["0"]["differences"] == [0.0]
