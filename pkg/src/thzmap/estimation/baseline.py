"""Per-scan strongest-bin baseline."""

from __future__ import annotations

import math

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from thzmap.channel.link_budget import db_to_amplitude
from thzmap.estimation.preprocess import Padp
from thzmap.estimation.sage import MpcEstimate
from thzmap.scene.models import TrxConfig


def max_search_baseline(padp: Padp, trx: TrxConfig | None = None) -> list[MpcEstimate]:
    """One estimate per scan at the strongest delay bin, with θ taken as the scan angle.

    With ``trx`` the boresight array offset 2R/c is added back, giving delays
    in the same reference as the estimator and the simulator.
    """
    offset = 2.0 * trx.uca_radius / SPEED_OF_LIGHT if trx is not None else 0.0
    peak_bins = np.argmax(padp.p_db, axis=0)
    estimates = []
    for scan_index, (bin_index, angle_deg) in enumerate(zip(peak_bins, padp.scan_angles_deg)):
        power_db = float(padp.p_db[bin_index, scan_index])
        estimates.append(
            MpcEstimate(
                alpha=complex(db_to_amplitude(power_db)),
                tau=float(padp.delay_axis[bin_index]) + offset,
                theta=math.radians(float(angle_deg)) % (2.0 * math.pi),
                power_db=power_db,
            )
        )
    return estimates
