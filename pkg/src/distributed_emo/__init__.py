"""Continuous-time distributed solvers for extended monotropic optimization.

The package simulates two Laplacian-coupled primal-dual flows over a
multi-agent communication graph: projected output feedback (DPOFA) and
derivative feedback (DDFA). Each agent holds a private convex objective,
a private closed convex set and one block of a shared affine equality
constraint.
"""

__version__ = "0.1.0"
