"""Spectral toolkit for half-line Jacobi operators and Herglotz functions."""
