"""Sketch-and-extrude command sequences: parsing, execution to meshes, and evaluation."""

__version__ = "0.1.0"
