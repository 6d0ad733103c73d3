"""Simulation of teleportation for superposed coherent states: an entangled coherent source, a
beam-splitter Bell measurement, Jaynes-Cummings correction and Monte Carlo average fidelity.
"""

__version__ = "0.1.0"
