"""Forward channel model: ground-truth paths and synthetic frequency responses."""

from thzmap.channel.antenna import (
    AntennaPattern,
    GaussianPattern,
    TabulatedPattern,
    antenna_gain,
    normalized_gain,
)
from thzmap.channel.errors import ChannelError
from thzmap.channel.link_budget import echo_amplitude_db, free_space_path_loss_db
from thzmap.channel.paths import GroundTruthPath, PathKind, enumerate_paths, scatter_points
from thzmap.channel.storage import load_response, save_response
from thzmap.channel.synthesis import (
    ChannelResponse,
    SimNoiseConfig,
    noise_for_snr,
    path_signature,
    synthesize_response,
)

__all__ = [
    "AntennaPattern",
    "ChannelError",
    "ChannelResponse",
    "GaussianPattern",
    "GroundTruthPath",
    "PathKind",
    "SimNoiseConfig",
    "TabulatedPattern",
    "antenna_gain",
    "echo_amplitude_db",
    "enumerate_paths",
    "free_space_path_loss_db",
    "load_response",
    "noise_for_snr",
    "normalized_gain",
    "path_signature",
    "save_response",
    "scatter_points",
    "synthesize_response",
]
