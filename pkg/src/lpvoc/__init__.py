"""Linear-prediction vocoders (CELP, LD-CELP, MELP) with analysis tools
and a MOS listening-test service."""

__version__ = "0.1.0"
