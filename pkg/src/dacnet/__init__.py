"""Divide-and-conquer optimization on graphs with fusion centers."""
