"""Montagovian generative lexicon: meaning assembly in many-sorted System F."""

__version__ = "0.1.0"
