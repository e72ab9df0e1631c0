"""Morse complexes of surfaces with boundary: absolute, relative and boundary
complexes, the hat-extension exact sequence, and the chain-level
Lefschetz intersection pairing, checked against simplicial homology."""

__version__ = "0.1.0"
