"""Free-fermionic two-color loop model toolkit."""

__version__ = "0.1.0"
