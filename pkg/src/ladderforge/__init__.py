"""ladderforge: content-adaptive bitrate ladders from source-video features.

The pipeline predicts the quality of hypothetical encodes from information
features extracted once from the uncompressed source, then assembles and
evaluates per-title bitrate ladders.
"""

__version__ = "0.1.0"

from .errors import LadderforgeError

__all__ = ["LadderforgeError", "__version__"]
