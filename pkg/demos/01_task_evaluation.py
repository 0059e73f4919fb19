#!/usr/bin/env python3
"""Evaluate one tracking task at a few control settings.

Walks the quality/resource model for a single target: how the angular
track error q, the detection probability and the radar time fraction g
respond to the coherent integration time, the update rate and the
number of horizontal elements the task runs on.
"""

from sapa_rrm import (
    ControlPoint,
    Environment,
    RadarConstants,
    UtilityShape,
    evaluate,
    linear_to_db,
)

consts = RadarConstants()
shape = UtilityShape()

# an agile crossing target of modest size at medium range
target = Environment(range=45e3, bearing=0.35, rcs=2.0,
                     maneuver_std=25.0, corr_time=15.0)

print("target: 45 km, 20 deg off boresight, 2 m^2, "
      "maneuver 25 m/s^2 over 15 s")
print()

header = (f"{'t_d [ms]':>9} {'f_t [Hz]':>9} {'n_h':>4} "
          f"{'SN0 [dB]':>9} {'q [mrad]':>9} {'p_d':>7} "
          f"{'looks':>7} {'g':>9} {'u':>6}")


def show(points):
    print(header)
    for cp in points:
        ev = evaluate(cp, target, consts, shape)
        if not ev.feasible:
            print(f"{cp.t_d * 1e3:9.1f} {cp.f_t:9.2f} {cp.n_h:4d} "
                  f"{'':>9} below the detection floor")
            continue
        print(f"{cp.t_d * 1e3:9.1f} {cp.f_t:9.2f} {cp.n_h:4d} "
              f"{linear_to_db(ev.snr_linear):9.2f} "
              f"{ev.quality * 1e3:9.4f} {ev.p_d:7.4f} "
              f"{ev.n_looks:7.2f} {ev.resource:9.6f} {ev.utility:6.3f}")
    print()


print("more elements buy SNR (as n_h^3) and a narrower beam, so the "
      "error drops fast:")
show([ControlPoint(t_d=16e-3, f_t=1.0, n_h=n) for n in (6, 12, 24, 48)])

print("a faster update rate tightens the track but bills more "
      "radar time:")
show([ControlPoint(t_d=16e-3, f_t=f, n_h=24)
      for f in (0.5, 1.0, 2.0, 4.0)])

# dwell time only pays off while the SNR credit is still growing, so
# show it on a small distant target that stays below the cap
target = Environment(range=250e3, bearing=0.35, rcs=0.5,
                     maneuver_std=25.0, corr_time=15.0)
print("longer dwells trade time for SNR; new target: 250 km, 0.5 m^2:")
show([ControlPoint(t_d=t * 1e-3, f_t=1.0, n_h=48)
      for t in (4.0, 16.0, 40.0, 64.0)])
