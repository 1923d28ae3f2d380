"""Wang shifts, toral Z^2 rotations and exact golden-field partitions."""

__version__ = "0.1.0"
