"""swellhp: spectral/hp element solver for planar Newtonian extrudate swell.

High-order incompressible Navier-Stokes on a moving domain with ALE
free-surface tracking, plus a batch CLI for Reynolds-number and wall-slip
parameter sweeps.
"""

__version__ = "0.1.0"
