"""Multifractional Brownian motion, its local times, and chaos kernels.

Submodules:
    specfun   -- constants, Hermite functions, the Hurst parameter function
    operator  -- the fractional operator on indicators, exact covariance
    simulate  -- exact (Cholesky) and circulant-embedding path generation
    localtime -- Monte-Carlo local time and its analytic expectation
    chaos     -- S-transforms, chaos kernels, eps -> 0 diagnostics
    cli       -- command-line interface
"""

__version__ = "0.1.0"
