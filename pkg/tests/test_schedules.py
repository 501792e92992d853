import math

import numpy as np
import pytest

from sgdlsq import (
    RECIPE_IDS,
    make_schedule,
    passes,
    recipe,
    recipe_table,
    validate_schedule,
)


class TestStepSchedule:
    def test_constant(self):
        sch = make_schedule(1.0, 0.0, 1.0)
        assert all(sch.eta(t) == 1.0 for t in (1, 5, 1000))

    def test_decaying_value(self):
        assert make_schedule(0.5, 0.5, 1.0).eta(4) == pytest.approx(0.25, abs=1e-15)

    def test_sec9_simple_sgm_setting(self):
        # eta_t = 1/(8m) at m=100 corresponds to eta1 = 1/800, theta = 0
        sch = make_schedule(1.0 / 800, 0.0, 1.0)
        assert sch.eta(1) == sch.eta(999) == 1.0 / 800

    def test_kappa_normalization(self):
        sch = make_schedule(0.5, 0.0, 0.25)
        assert sch.eta(1) == 2.0

    @pytest.mark.parametrize("theta", [0.0, 0.3, 0.99])
    def test_monotone_nonincreasing(self, theta):
        etas = make_schedule(0.7, theta).etas(200)
        assert np.all(np.diff(etas) <= 0)
        assert np.all(etas > 0)

    def test_eta_sum_empty_range_is_zero(self):
        assert make_schedule(1.0).eta_sum(5, 4) == 0.0

    def test_invalid_parameters(self):
        for bad in ({"eta1": 0.0}, {"eta1": -1.0}, {"theta": 1.0}, {"theta": -0.1}):
            with pytest.raises(ValueError):
                make_schedule(**{"eta1": 0.5, "theta": 0.0, **bad})


class TestValidateSchedule:
    def test_ok_case(self):
        chk = validate_schedule(make_schedule(0.001), 1000)
        assert chk.ok and chk.ratio < 1

    def test_warning_case(self):
        chk = validate_schedule(make_schedule(0.02), 1000)
        assert not chk.ok
        assert chk.ratio == pytest.approx(0.02 * 8 * (math.log(1000) + 1), rel=1e-12)
        assert chk.ratio == pytest.approx(1.265, abs=5e-4)

    def test_tiny_step_always_ok(self):
        assert validate_schedule(make_schedule(1e-12), 10**6).ok

    def test_requires_t_at_least_3(self):
        with pytest.raises(ValueError):
            validate_schedule(make_schedule(0.1), 2)


class TestPasses:
    def test_values(self):
        assert passes(1, 100, 100) == 1
        assert passes(1, 250, 100) == 3
        assert passes(10, 10, 100) == 1
        assert passes(3, 7, 10) == 3  # ceil(21/10)

    def test_exact_integer_arithmetic_large(self):
        # large enough that float ceiling would be unreliable
        assert passes(3, 10**15 + 1, 3) == 10**15 + 1
        assert passes(1, 10**15 + 1, 10**15) == 2


class TestRecipes:
    def test_c3_reference_point(self):
        r = recipe("C3", 100, zeta=0.5, gamma=1.0, c_eta=0.125)
        assert (r.b, r.t_star) == (1, 1000)
        assert r.schedule.eta1 == pytest.approx(0.00125, abs=1e-18)
        assert r.schedule.theta == 0.0

    def test_c6_reference_point(self):
        r = recipe("C6", 100, zeta=0.5, gamma=1.0)
        assert (r.b, r.t_star) == (10, 10)

    def test_c7_log_step(self):
        r = recipe("C7", 100)
        assert r.b == 100
        assert r.schedule.eta1 == pytest.approx(0.125 / math.log(100), rel=1e-12)

    def test_c4_matches_sqrt_choices(self):
        r = recipe("C4", 100, zeta=0.5, gamma=1.0, c_eta=0.125)
        assert r.b == 10
        assert r.schedule.eta1 == pytest.approx(0.125 / 10, rel=1e-12)
        assert r.t_star == 100  # m^(1/2 + 1/2)

    def test_bgm_branches(self):
        assert recipe("BGM", 100).t_star == 10
        assert recipe("BGM", 100).schedule.eta1 == 0.125
        # non-attainable side needs epsilon
        with pytest.raises(ValueError, match="regime requires epsilon"):
            recipe("BGM", 100, zeta=0.2, gamma=0.5)
        r = recipe("BGM", 100, zeta=0.2, gamma=0.5, eps=0.5)
        assert r.t_star == 10  # ceil(100^0.5)

    def test_c11_c12_branches(self):
        assert recipe("C11", 100).t_star == 1000
        # alpha = 0.8 <= 1: T* = ceil(m^(2 - eps)) = ceil(100^1.5)
        assert recipe("C11", 100, zeta=0.2, gamma=0.4, eps=0.5).t_star == 1000
        assert recipe("C12", 100).t_star == 100
        with pytest.raises(ValueError, match="regime requires epsilon"):
            recipe("C12", 100, zeta=0.2, gamma=0.4)

    def test_b_family(self):
        r1 = recipe("B1", 100, zeta=0.4, gamma=0.9)
        # alpha = 1.7 > 1: eta1 = c * m^(-0.8/1.7), T* = ceil(m^(1.8/1.7))
        assert r1.schedule.eta1 == pytest.approx(0.125 * 100 ** (-0.8 / 1.7), rel=1e-12)
        assert r1.t_star == math.ceil(100 ** (1.8 / 1.7) - 1e-9)
        r2 = recipe("B2", 100, zeta=0.4, gamma=0.9)
        assert r2.b == math.ceil(100 ** (0.8 / 1.7) - 1e-9)
        r3 = recipe("B3", 100, zeta=0.4, gamma=0.9)
        assert r3.b == 100 and r3.t_star == r2.t_star

    @pytest.mark.parametrize("rid", RECIPE_IDS)
    def test_recipe_is_pure(self, rid):
        kwargs = dict(m=64, zeta=0.5, gamma=1.0, eps=0.3, c_eta=0.125)
        assert recipe(rid, **kwargs) == recipe(rid, **kwargs)

    @pytest.mark.parametrize("rid", RECIPE_IDS)
    @pytest.mark.parametrize("m", [10, 100, 1000])
    def test_b_in_range_and_tstar_positive(self, rid, m):
        r = recipe(rid, m, zeta=0.5, gamma=1.0, eps=0.3)
        assert 1 <= r.b <= m
        assert r.t_star >= 1
        assert r.passes >= 1

    @pytest.mark.parametrize("rid", ["C3", "C4"])
    @pytest.mark.parametrize("m", [64, 100, 256, 1000])
    def test_pass_counts_track_m_to_inverse_alpha(self, rid, m):
        """Both single-point and sqrt-batch settings consume about
        m^(1/(2 zeta + gamma)) passes, within ceiling effects."""
        zeta, gamma = 0.5, 1.0
        r = recipe(rid, m, zeta=zeta, gamma=gamma)
        target = m ** (1.0 / (2 * zeta + gamma))
        assert abs(r.passes - math.ceil(target)) <= 1

    def test_json_field_names(self):
        row = recipe("C3", 100).to_json_dict()
        assert set(row) == {"corollary", "b", "eta1", "theta", "t_star", "passes", "regime"}

    def test_table_covers_all_ids(self):
        table = recipe_table(100, eps=0.3)
        assert [r.corollary for r in table] == list(RECIPE_IDS)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            recipe("C3", 100, zeta=0.0)
        with pytest.raises(ValueError):
            recipe("C3", 100, gamma=1.5)
        with pytest.raises(ValueError):
            recipe("C3", 100, c_eta=0.0)
        with pytest.raises(ValueError):
            recipe("XX", 100)
