"""wavescrub: scale-aware video anonymization via wavelet coefficient destruction."""

__version__ = "0.1.0"
