"""Desk-scale numerics for first Dirichlet eigenvalues on radial models:
Bessel eigenvalue constants, weighted 1-D eigensolvers, warped-product
surface classification, and Hardy-inequality verification.
"""

__version__ = "0.1.0"
