#!/usr/bin/env python3
"""Angular error versus range for a fixed control setting.

The SNR cap bends the curve into a V: inside the cap-crossing range the
accuracy credit saturates while the geometric error contribution keeps
shrinking as the target closes in, so the error actually falls with
increasing range until the cap releases, then climbs the usual way.
"""

import numpy as np

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
cp = ControlPoint(t_d=20e-3, f_t=2.0, n_h=48)
rcs = 10.0

# range where the unclamped SNR meets the cap for this setting
r_star = (consts.k_rad * cp.n_h**3 * cp.t_d * rcs / consts.snr_cap) ** 0.25
print(f"control: t_d = {cp.t_d * 1e3:.0f} ms, f_t = {cp.f_t:.0f} Hz, "
      f"n_h = {cp.n_h}, target {rcs:.0f} m^2 on boresight")
print(f"cap-crossing range: {r_star / 1e3:.1f} km")
print()

print(f"{'range [km]':>11} {'SN0 [dB]':>9} {'q [mrad]':>9} "
      f"{'u':>6}   regime")
for r in np.concatenate([np.linspace(60e3, r_star, 6),
                         np.linspace(1.05 * r_star, 600e3, 8)]):
    ev = evaluate(cp, Environment(range=float(r), bearing=0.0, rcs=rcs,
                                  maneuver_std=0.1, corr_time=4.0),
                  consts, shape)
    if not ev.feasible:
        print(f"{r / 1e3:11.1f}  below the detection floor")
        continue
    capped = ev.snr_linear == consts.snr_cap
    regime = "capped" if capped else "free"
    print(f"{r / 1e3:11.1f} {linear_to_db(ev.snr_linear):9.2f} "
          f"{ev.quality * 1e3:9.4f} {ev.utility:6.3f}   {regime}")

print()
print("note the error minimum at the cap-crossing range: tracking is")
print("sharpest exactly where the SNR credit stops growing.")
