import math

import numpy as np
import pytest

from oracles import unreduced_cu_rate, unreduced_d2d_rate
from risuav.channel import (
    ChannelBuilder,
    ChannelMode,
    PathLossLaw,
    RadioConfig,
    build_channel_state,
    dbm_to_watt,
    draw_fading,
    eta_m,
    lambda_n,
    path_loss_db,
    sample_fading_amp,
    watt_to_dbm,
)
from risuav.geometry import LinkClass, Position3
from risuav.scenario import GenerationConfig, generate_scenario
from risuav.throughput import cu_rate, d2d_rate

from conftest import make_scenario


class TestConversions:
    @pytest.mark.parametrize("dbm,watt", [(30.0, 1.0), (0.0, 1e-3), (-100.0, 1e-13)])
    def test_dbm_to_watt(self, dbm, watt):
        assert dbm_to_watt(dbm) == pytest.approx(watt, rel=1e-12)

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        for v in rng.uniform(-150, 60, 100):
            assert watt_to_dbm(dbm_to_watt(v)) == pytest.approx(v, rel=1e-12, abs=1e-12)

    def test_watt_to_dbm_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            watt_to_dbm(0.0)


class TestPathLoss:
    def test_unit_distance_is_intercept(self):
        assert path_loss_db(1.0, LinkClass.LOS, RadioConfig()) == pytest.approx(61.2)

    def test_los_at_100m(self):
        assert path_loss_db(100.0, LinkClass.LOS, RadioConfig()) == pytest.approx(101.2)

    def test_nlos_at_100m(self):
        assert path_loss_db(100.0, LinkClass.NLOS, RadioConfig()) == pytest.approx(130.4)

    def test_rejects_nonpositive_distance(self):
        with pytest.raises(ValueError):
            path_loss_db(0.0, LinkClass.LOS, RadioConfig())

    def test_monotone_and_nlos_dominates(self):
        radio = RadioConfig()
        prev_los = prev_nlos = -math.inf
        for d in np.linspace(1.0, 400.0, 100):
            los = path_loss_db(d, LinkClass.LOS, radio)
            nlos = path_loss_db(d, LinkClass.NLOS, radio)
            assert los > prev_los and nlos > prev_nlos
            assert nlos >= los
            prev_los, prev_nlos = los, nlos


class TestFadingSampler:
    def test_large_k_is_pure_los(self):
        rng = np.random.default_rng(0)
        amps = sample_fading_amp(LinkClass.LOS, 1e9, rng, size=1000)
        assert np.allclose(amps, 1.0, atol=0.01)

    @pytest.mark.parametrize("k", [0.0, 3.0, 10.0])
    def test_unit_mean_square(self, k):
        rng = np.random.default_rng(1)
        amps = sample_fading_amp(LinkClass.LOS, k, rng, size=1_000_000)
        assert np.mean(amps**2) == pytest.approx(1.0, rel=0.01)

    def test_nlos_ignores_k(self):
        a = sample_fading_amp(LinkClass.NLOS, 0.0, np.random.default_rng(5), size=64)
        b = sample_fading_amp(LinkClass.NLOS, 7.0, np.random.default_rng(5), size=64)
        assert np.array_equal(a, b)

    def test_scalar_draw(self):
        amp = sample_fading_amp(LinkClass.LOS, 3.0, np.random.default_rng(2))
        assert isinstance(amp, float) and amp > 0

    def test_rejects_negative_k(self):
        with pytest.raises(ValueError):
            sample_fading_amp(LinkClass.LOS, -1.0, np.random.default_rng(0))


class TestChannelState:
    def test_expected_mode_kappa_is_r_squared(self, table1_scenario):
        st = build_channel_state(table1_scenario, Position3(150, 150, 25.0))
        assert np.all(st.kappa == 62_500.0)
        assert np.all(st.f_sq == 1.0)

    def test_sampled_determinism(self, table1_scenario):
        r = Position3(120.0, 80.0, 25.0)
        a = build_channel_state(table1_scenario, r, ChannelMode.SAMPLED, seed=9)
        b = build_channel_state(table1_scenario, r, ChannelMode.SAMPLED, seed=9)
        assert np.array_equal(a.kappa, b.kappa)
        assert np.array_equal(a.f_sq, b.f_sq)
        assert np.array_equal(a.hop1_class, b.hop1_class)

    def test_classes_match_position(self, table1_scenario):
        scn = table1_scenario
        r = Position3(40.0, 260.0, 25.0)
        st = build_channel_state(scn, r)
        from risuav.geometry import classify_link

        for m in (0, 13, 41):
            tx, rx = scn.d2d_pairs[m]
            assert st.hop_classes(m) == (
                classify_link(tx, r, scn.obstacles),
                classify_link(r, rx, scn.obstacles),
            )

    def test_rebuild_reuses_draw(self, table1_scenario):
        builder = ChannelBuilder(table1_scenario, ChannelMode.SAMPLED, seed=4)
        a = builder.at(Position3(10.0, 10.0, 25.0))
        b = builder.at(Position3(290.0, 290.0, 25.0))
        assert a.table is b.table

    def test_rejects_wrong_height(self, table1_scenario):
        with pytest.raises(ValueError):
            build_channel_state(table1_scenario, Position3(0.0, 0.0, 10.0))

    def test_rayleigh_ensemble_kappa(self):
        # with k=0 both hops are Rayleigh; E[kappa]/R^2 -> (pi/4)^2 + var/R
        scn = make_scenario(
            pairs=[((40.0, 50.0), (60.0, 50.0))],
            cus=[(50.0, 50.0)],
            radio=RadioConfig(rician_k=0.0, ris_elements=250),
        )
        vals = []
        for seed in range(1000):
            table = draw_fading(scn, ChannelMode.SAMPLED, seed)
            vals.append(table.kappa_table[0, 0] / 250.0**2)
        expected = (math.pi / 4.0) ** 2 + (1.0 - (math.pi / 4.0) ** 2) / 250.0
        assert np.mean(vals) == pytest.approx(expected, rel=0.05)


class TestPrefactors:
    def test_eta_unit_exponent(self):
        # contrived radio: exponent collapses to zero and N0 = 1 W
        radio = RadioConfig(
            tx_power_d2d_dbm=30.0,
            gain_tx_dbi=0.0,
            gain_rx_dbi=0.0,
            noise_dbm=30.0,
            pl_los=PathLossLaw(0.0, 2.0),
            ris_elements=1,
        )
        scn = make_scenario(pairs=[((40.0, 50.0), (60.0, 50.0))], cus=[(1.0, 1.0)], radio=radio)
        st = build_channel_state(scn, Position3(50.0, 50.0, 25.0))
        assert eta_m(0, st, scn) == pytest.approx(1.0, rel=1e-12)

    def test_eta_table1_hand_value(self, table1_scenario):
        scn = generate_scenario(GenerationConfig(num_obstacles=0), seed=1)
        st = build_channel_state(scn, Position3(150.0, 150.0, 25.0))
        hand = 62_500.0 / 1e-13 * 10.0 ** ((30 + 49 - 61.2 - 61.2 - 30) / 10.0)
        assert eta_m(0, st, scn) == pytest.approx(hand, rel=1e-12)

    def test_nlos_hop_drops_eta(self):
        # one NLoS hop swaps alpha 61.2 -> 72.0, a factor 10^1.08
        scn = make_scenario(
            pairs=[((10.0, 50.0), (90.0, 50.0))],
            cus=[(50.0, 10.0)],
        )
        from risuav.channel import d2d_prefactors

        plf = d2d_prefactors(scn.radio)
        assert plf[0] / plf[1] == pytest.approx(10.0 ** 1.08, rel=1e-12)
        assert plf[1] == pytest.approx(plf[2], rel=1e-12)

    def test_lambda_hand_value(self):
        scn = make_scenario(pairs=[((40.0, 50.0), (60.0, 50.0))], cus=[(50.0, 50.0)])
        st = build_channel_state(scn, Position3(50.0, 50.0, 25.0))
        hand = 1.0 / 1e-13 * 10.0 ** ((30 + 49 - 61.2 - 30) / 10.0)
        assert lambda_n(0, st, scn) == pytest.approx(hand, rel=1e-12)

    def test_lambda_zero_gain(self):
        scn = make_scenario(pairs=[((40.0, 50.0), (60.0, 50.0))], cus=[(50.0, 50.0)])
        builder = ChannelBuilder(scn, ChannelMode.SAMPLED, seed=0)
        st = builder.at(Position3(50.0, 50.0, 25.0))
        zeroed = np.zeros_like(st.f_sq)
        object.__setattr__(st, "f_sq", zeroed)
        assert lambda_n(0, st, scn) == 0.0


class TestPipelineEquivalence:
    def test_reduced_equals_unreduced_on_random_links(self, table1_scenario):
        scn = table1_scenario
        rng = np.random.default_rng(10)
        checked = 0
        for _ in range(60):
            r = Position3(*rng.uniform(0, 300, 2), 25.0)
            st = build_channel_state(scn, r, ChannelMode.SAMPLED, seed=int(rng.integers(1 << 30)))
            for m in rng.integers(0, scn.num_pairs, 10):
                assert d2d_rate(int(m), r, st, scn) == pytest.approx(
                    unreduced_d2d_rate(int(m), r, st, scn), rel=1e-10
                )
                checked += 1
            for n in rng.integers(0, scn.num_cus, 7):
                assert cu_rate(int(n), r, st, scn) == pytest.approx(
                    unreduced_cu_rate(int(n), r, st, scn), rel=1e-10
                )
                checked += 1
        assert checked >= 1000
