"""Test package for the distributed EMO solvers."""
