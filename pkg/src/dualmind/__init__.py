"""World-model link scheduler for mmWave V2X networks."""

__version__ = "0.1.0"
