"""Capacity regions and achievability simulation for the state-dependent
multiple-access channel whose second encoder knows the state and cribs from
the first encoder."""

__version__ = "0.1.0"
