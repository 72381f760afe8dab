"""Exact Morse-Novikov homology of cell complexes and a numerical harness for
beta-critical points, generating functions and Liouville chords on flat tori."""

__version__ = "0.1.0"
