"""umbilic-atlas: numerical laboratory for Codazzi pairs on surfaces."""

__version__ = "0.1.0"
