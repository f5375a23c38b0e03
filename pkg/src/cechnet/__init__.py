"""Distributed Čech complexes for simulated wireless cells.

Cells are disks in the plane.  The package builds the Čech complex of their
union by message passing, finds coverage-hole boundary cycles and lowers
transmit radii while keeping the Betti numbers fixed.
"""

__version__ = "0.1.0"
