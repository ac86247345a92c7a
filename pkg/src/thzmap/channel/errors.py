from __future__ import annotations


class ChannelError(ValueError):
    """Raised when a channel response cannot be synthesized or stored."""
