"""Spatial Flip Lab - spatial-audio self-supervision on synthetic scenes."""

__version__ = "0.1.0"
