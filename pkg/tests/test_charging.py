"""Two-phase charging simulation, history evaluation and power profiles."""

import numpy as np
import pytest

from smartcharge.charging import (
    ChargingPolicy,
    adaptive_profile,
    evaluate_policy,
    oracle_profile,
    raw_profile,
    simulate_session,
)

from conftest import BASE_EPOCH, make_session

REL = 1e-9


def rel_eq(a, b, tol=REL):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


class TestSimulateSession:
    def test_long_session_no_loss(self):
        # hand-evaluated with a scalar calculator: boost caps at 0.5 h,
        # the slow phase finishes the remaining 3.5 kWh at 0.7 kW
        s = make_session(plugin_hours=10.0, energy_kwh=7.0)
        o = simulate_session(s, ChargingPolicy(0.5, 0.1), 7.0)
        assert o.t_boost_hours == 0.5
        assert o.e_boost_kwh == 3.5
        assert o.e_total_kwh == 7.0
        assert o.e_slow_kwh == 3.5
        assert rel_eq(o.t_slow_hours, 5.0)
        assert rel_eq(o.p_eff_kw, 3.85)
        assert o.e_loss_kwh == 0.0

    def test_short_session_with_loss(self):
        s = make_session(plugin_hours=2.0, energy_kwh=14.0)
        o = simulate_session(s, ChargingPolicy(0.5, 0.1), 7.0)
        assert rel_eq(o.e_total_kwh, 4.55)
        assert rel_eq(o.e_loss_kwh, 9.45)
        assert rel_eq(o.p_eff_kw, 1.8025)

    def test_raw_equivalent_policy(self):
        for plugin, energy in [(10.0, 7.0), (3.0, 2.5), (0.5, 1.0)]:
            s = make_session(plugin_hours=plugin, energy_kwh=energy)
            o = simulate_session(s, ChargingPolicy(energy / 7.0, 1.0), 7.0)
            assert rel_eq(o.e_total_kwh, energy) or o.e_total_kwh == energy
            assert rel_eq(o.p_eff_kw, 7.0)

    def test_zero_energy(self):
        s = make_session(energy_kwh=0.0)
        o = simulate_session(s, ChargingPolicy(1.0, 0.5), 7.0)
        assert o.e_total_kwh == 0.0
        assert o.p_eff_kw == 0.0
        assert o.t_slow_hours == 0.0

    def test_outcome_invariants_random(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            plugin = float(rng.uniform(0.05, 48.0))
            p_max = float(rng.uniform(1.0, 50.0))
            energy = float(rng.uniform(0.0, p_max * plugin))
            policy = ChargingPolicy(
                float(rng.uniform(0.0, 30.0)), float(rng.uniform(0.0, 1.0))
            )
            s = make_session(plugin_hours=plugin, energy_kwh=energy)
            o = simulate_session(s, policy, p_max)
            assert o.e_total_kwh <= energy + 1e-12
            assert rel_eq(o.e_total_kwh, o.e_boost_kwh + o.e_slow_kwh)
            assert -1e-12 <= o.p_eff_kw <= p_max * (1 + 1e-12)
            assert o.t_boost_hours <= min(plugin, energy / p_max) + 1e-12
            if 0 < o.e_total_kwh and o.e_total_kwh == energy:
                assert o.p_eff_kw >= policy.p_rate * p_max - 1e-9

    def test_monotonicity_in_p_rate_and_boost(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            plugin = float(rng.uniform(0.1, 40.0))
            p_max = float(rng.uniform(1.0, 30.0))
            energy = float(rng.uniform(0.0, p_max * plugin))
            s = make_session(plugin_hours=plugin, energy_kwh=energy)
            t = float(rng.uniform(0.0, 20.0))
            p1, p2 = sorted(rng.uniform(0.0, 1.0, size=2))
            lo = simulate_session(s, ChargingPolicy(t, float(p1)), p_max)
            hi = simulate_session(s, ChargingPolicy(t, float(p2)), p_max)
            assert hi.e_total_kwh >= lo.e_total_kwh - 1e-12
            p = float(rng.uniform(0.0, 1.0))
            t1, t2 = sorted(rng.uniform(0.0, 20.0, size=2))
            lo = simulate_session(s, ChargingPolicy(float(t1), p), p_max)
            hi = simulate_session(s, ChargingPolicy(float(t2), p), p_max)
            assert hi.e_total_kwh >= lo.e_total_kwh - 1e-12


class TestEvaluatePolicy:
    def test_two_session_example(self):
        history = [
            make_session(plugin_hours=10.0, energy_kwh=7.0, event_id=1),
            make_session(
                start=BASE_EPOCH + 200000, plugin_hours=2.0, energy_kwh=14.0, event_id=2
            ),
        ]
        ev = evaluate_policy(history, ChargingPolicy(0.5, 0.1), 7.0)
        assert rel_eq(ev.e_loss_kwh, 9.45)
        assert rel_eq(ev.p_aggr_kw, 3.043409090909091)

    def test_raw_equivalent_history(self):
        history = [
            make_session(plugin_hours=10.0, energy_kwh=7.0, event_id=1),
            make_session(
                start=BASE_EPOCH + 200000, plugin_hours=4.0, energy_kwh=3.0, event_id=2
            ),
        ]
        ev = evaluate_policy(history, ChargingPolicy(100.0, 1.0), 7.0)
        assert ev.e_loss_kwh == 0.0
        assert rel_eq(ev.p_aggr_kw, 7.0)

    def test_identical_sessions_match_single(self):
        s = make_session(plugin_hours=10.0, energy_kwh=7.0)
        policy = ChargingPolicy(0.5, 0.1)
        single = simulate_session(s, policy, 7.0)
        ev = evaluate_policy([s] * 5, policy, 7.0)
        assert rel_eq(ev.p_aggr_kw, single.p_eff_kw)

    def test_matches_per_session_aggregation(self):
        rng = np.random.default_rng(21)
        history = [
            make_session(
                start=BASE_EPOCH + i * 200000,
                plugin_hours=float(rng.uniform(0.5, 24.0)),
                energy_kwh=float(rng.uniform(0.0, 60.0)),
                event_id=i,
            )
            for i in range(40)
        ]
        p_max = 9.0
        policy = ChargingPolicy(1.3, 0.22)
        outcomes = [simulate_session(s, policy, p_max) for s in history]
        e_loss = sum(o.e_loss_kwh for o in outcomes)
        delivered = sum(o.e_total_kwh for o in outcomes)
        p_aggr = sum(o.p_eff_kw * o.e_total_kwh for o in outcomes) / delivered
        ev = evaluate_policy(history, policy, p_max)
        assert rel_eq(ev.e_loss_kwh, e_loss)
        assert rel_eq(ev.p_aggr_kw, p_aggr)

    def test_all_zero_energy_history(self):
        history = [make_session(energy_kwh=0.0)]
        ev = evaluate_policy(history, ChargingPolicy(1.0, 0.5), 7.0)
        assert ev.p_aggr_kw == 0.0

    def test_empty_history_errors(self):
        with pytest.raises(ValueError):
            evaluate_policy([], ChargingPolicy(1.0, 0.5), 7.0)


class TestProfiles:
    def test_raw_simple(self):
        s = make_session(plugin_hours=10.0, energy_kwh=7.0)
        prof = raw_profile(s, 7.0)
        assert prof.pieces == ((float(s.start), float(s.start) + 3600.0, 7.0),)
        assert rel_eq(prof.energy_kwh(), 7.0)

    def test_raw_boundary_full_window(self):
        # the max-power-defining session charges for its entire window
        s = make_session(plugin_hours=2.0, energy_kwh=14.0)
        prof = raw_profile(s, 7.0)
        (t0, t1, kw) = prof.pieces[0]
        assert t1 - t0 == 2.0 * 3600.0
        assert kw == 7.0

    def test_raw_zero_energy_empty(self):
        assert raw_profile(make_session(energy_kwh=0.0), 7.0).pieces == ()

    def test_oracle_even_spread(self):
        s = make_session(plugin_hours=10.0, energy_kwh=7.0)
        prof = oracle_profile(s)
        (t0, t1, kw) = prof.pieces[0]
        assert rel_eq(kw, 0.7)
        assert t1 - t0 == 10.0 * 3600.0

    def test_oracle_can_exceed_realistic_rate(self):
        s = make_session(plugin_hours=0.066, energy_kwh=10.2)
        (t0, t1, kw) = oracle_profile(s).pieces[0]
        assert rel_eq(kw, 154.54545454545453)

    def test_oracle_equals_raw_for_defining_session(self):
        s = make_session(plugin_hours=2.0, energy_kwh=14.0)
        assert oracle_profile(s).pieces == raw_profile(s, 7.0).pieces

    def test_adaptive_two_pieces(self):
        s = make_session(plugin_hours=10.0, energy_kwh=7.0)
        policy = ChargingPolicy(0.5, 0.1)
        o = simulate_session(s, policy, 7.0)
        prof = adaptive_profile(s, o, 7.0, policy)
        assert len(prof.pieces) == 2
        (b0, b1, bkw), (s0, s1, skw) = prof.pieces
        assert b1 - b0 == 0.5 * 3600.0
        assert bkw == 7.0
        assert s0 == b1
        assert rel_eq(s1 - s0, 5.0 * 3600.0)
        assert rel_eq(skw, 0.7)
        assert rel_eq(prof.energy_kwh(), o.e_total_kwh)

    def test_adaptive_empty_when_idle_policy(self):
        s = make_session(plugin_hours=10.0, energy_kwh=7.0)
        policy = ChargingPolicy(0.0, 0.0)
        o = simulate_session(s, policy, 7.0)
        assert o.e_total_kwh == 0.0
        assert adaptive_profile(s, o, 7.0, policy).pieces == ()

    def test_adaptive_equals_raw_for_raw_equivalent_policy(self):
        s = make_session(plugin_hours=10.0, energy_kwh=7.0)
        policy = ChargingPolicy(100.0, 1.0)
        o = simulate_session(s, policy, 7.0)
        prof = adaptive_profile(s, o, 7.0, policy)
        raw = raw_profile(s, 7.0)
        assert len(prof.pieces) == len(raw.pieces) == 1
        for a, b in zip(prof.pieces[0], raw.pieces[0]):
            assert rel_eq(a, b)

    def test_integral_matches_outcome_random(self):
        rng = np.random.default_rng(33)
        for i in range(300):
            plugin = float(rng.uniform(0.05, 48.0))
            p_max = float(rng.uniform(1.0, 40.0))
            energy = float(rng.uniform(0.0, p_max * plugin))
            s = make_session(plugin_hours=plugin, energy_kwh=energy, event_id=i)
            policy = ChargingPolicy(
                float(rng.uniform(0.0, 30.0)), float(rng.uniform(0.0, 1.0))
            )
            o = simulate_session(s, policy, p_max)
            assert rel_eq(adaptive_profile(s, o, p_max, policy).energy_kwh(), o.e_total_kwh)
            assert rel_eq(raw_profile(s, p_max).energy_kwh(), energy)
            assert rel_eq(oracle_profile(s).energy_kwh(), energy)

    def test_oracle_peak_never_above_raw(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            plugin = float(rng.uniform(0.1, 48.0))
            p_max = float(rng.uniform(1.0, 40.0))
            energy = float(rng.uniform(0.0, p_max * plugin))
            s = make_session(plugin_hours=plugin, energy_kwh=energy)
            assert (
                oracle_profile(s).peak_kw() <= raw_profile(s, p_max).peak_kw() + 1e-12
            )

    def test_profiles_confined_to_charge_window(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            plugin = float(rng.uniform(0.1, 48.0))
            p_max = float(rng.uniform(1.0, 40.0))
            energy = float(rng.uniform(0.0, p_max * plugin))
            s = make_session(plugin_hours=plugin, energy_kwh=energy)
            policy = ChargingPolicy(
                float(rng.uniform(0.0, 30.0)), float(rng.uniform(0.0, 1.0))
            )
            o = simulate_session(s, policy, p_max)
            window_end = s.start + plugin * 3600.0
            for prof in (
                raw_profile(s, p_max),
                oracle_profile(s),
                adaptive_profile(s, o, p_max, policy),
            ):
                prev_end = float(s.start)
                for t0, t1, kw in prof.pieces:
                    assert t0 == prev_end
                    assert t1 <= window_end * (1 + 1e-12)
                    prev_end = t1
