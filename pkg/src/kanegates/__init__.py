"""Gate compiler and simulator for two phosphorus donor nuclear spins in silicon."""

__version__ = "0.1.0"
