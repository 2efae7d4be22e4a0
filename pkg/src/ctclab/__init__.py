"""ctclab: a numerical laboratory for closed-timelike-curve consistency conditions."""

__version__ = "0.1.0"
