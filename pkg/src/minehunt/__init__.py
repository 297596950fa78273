"""Certified analysis of the distributed mine-hunting game.

Subpackages cover exact linear programming, no-signaling boxes, the game
definitions, classical strategy enumeration, wiring sweeps over box-assisted
protocols, and quantum strategies.
"""

__version__ = "0.1.0"
