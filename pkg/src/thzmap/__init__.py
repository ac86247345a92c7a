"""300 GHz monostatic sensing: channel simulation, path estimation, mapping and material identification."""

__version__ = "0.1.0"

from thzmap.config import ConfigLoadError, Method, PipelineConfig, load_config  # noqa: E402

__all__ = [
    "ConfigLoadError",
    "Method",
    "PipelineConfig",
    "__version__",
    "load_config",
]
