"""Delay-domain preprocessing and multipath parameter estimation."""

from thzmap.estimation.baseline import max_search_baseline
from thzmap.estimation.errors import EstimationError
from thzmap.estimation.export import load_estimates_csv, save_estimates_csv, save_padp_csv
from thzmap.estimation.preprocess import (
    Cir,
    Padp,
    Window,
    calibrate,
    compute_padp,
    delay_domain_floor,
    estimate_noise_floor,
    peak_noise_floor,
    to_cir,
)
from thzmap.estimation.sage import MpcEstimate, SageConfig, SageTrace, reconstruct_response, sage_estimate

__all__ = [
    "Cir",
    "EstimationError",
    "MpcEstimate",
    "Padp",
    "SageConfig",
    "SageTrace",
    "Window",
    "calibrate",
    "compute_padp",
    "delay_domain_floor",
    "estimate_noise_floor",
    "load_estimates_csv",
    "max_search_baseline",
    "peak_noise_floor",
    "reconstruct_response",
    "sage_estimate",
    "save_estimates_csv",
    "save_padp_csv",
    "to_cir",
]
