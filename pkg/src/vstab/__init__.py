"""Combinatorics of V-stability conditions and Neron-type upper subsets of orbit posets."""

__version__ = "0.1.0"
