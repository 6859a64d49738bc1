#!/usr/bin/env python3
"""The two-phase charging function on a single session.

A policy is (max boost duration, slow-rate coefficient): the charger runs at
full power for the boost phase, then at coefficient * max power until the
session ends or the target energy is met.  Raw charging and the
known-duration ideal spread are the two baselines.
"""

from datetime import datetime

from smartcharge import (
    ChargingPolicy,
    Session,
    adaptive_profile,
    oracle_profile,
    raw_profile,
    simulate_session,
)

start = int((datetime(2017, 6, 1, 18, 0) - datetime(1970, 1, 1)).total_seconds())
session = Session(
    event_id=1,
    cp_id="AN00001",
    start=start,
    end=start + 10 * 3600,
    energy_kwh=7.0,
    plugin_hours=10.0,
)
p_max = 7.0

print(f"session: {session.energy_kwh} kWh target, {session.plugin_hours} h plugged in")
print(f"charger max rate: {p_max} kW")
print()

policy = ChargingPolicy(t_boost_max_hours=0.5, p_rate=0.1)
outcome = simulate_session(session, policy, p_max)
print(f"policy: boost up to {policy.t_boost_max_hours} h, slow at {policy.p_rate} x max")
print(f"  boost : {outcome.t_boost_hours:.2f} h at {p_max} kW -> {outcome.e_boost_kwh:.2f} kWh")
print(f"  slow  : {outcome.t_slow_hours:.2f} h at {policy.p_rate * p_max:.2f} kW -> {outcome.e_slow_kwh:.2f} kWh")
print(f"  delivered {outcome.e_total_kwh:.2f} kWh, shortfall {outcome.e_loss_kwh:.2f} kWh")
print(f"  effective rate {outcome.p_eff_kw:.2f} kW (vs {p_max} kW raw)")
print()

for name, profile in [
    ("raw", raw_profile(session, p_max)),
    ("ideal", oracle_profile(session)),
    ("two-phase", adaptive_profile(session, outcome, p_max, policy)),
]:
    desc = " + ".join(
        f"{kw:.2f} kW x {(t1 - t0) / 3600:.2f} h" for t0, t1, kw in profile.pieces
    )
    print(f"{name:>9}: {desc or 'idle'}  (integral {profile.energy_kwh():.2f} kWh, peak {profile.peak_kw():.2f} kW)")

# a tight session cannot be fully served by a gentle policy
tight = Session(1, "AN00001", start, start + 2 * 3600, 14.0, 2.0)
outcome = simulate_session(tight, policy, p_max)
print()
print(
    f"tight session (14 kWh in 2 h): delivered {outcome.e_total_kwh:.2f} kWh, "
    f"shortfall {outcome.e_loss_kwh:.2f} kWh"
)
