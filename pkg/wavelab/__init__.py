# -*- coding: UTF-8 -*-
# flake8: noqa: F401
__title__ = 'wavelab'
__author__ = 'wavelab developers'
__license__ = 'AGPLv3'
__version__ = '0.1.0'


from wavelab.experiments.verify import (
    KernelVerification, LinearVerification, EstimateVerification
)
from wavelab.experiments.runs import (
    SolveExperiment, LifespanExperiment, FitExperiment
)
from wavelab.experiments.studies import ComparisonExperiment, ResidualExperiment


"""
MODULE         Role
--------       ---------------------------------------------------------------
sphmeans       spherical means of radial functions through John's identity
                                     │
                                     ↓
fields         radial profiles, the (r, t) lattice and fields on it
                                     │
                    ┌────────────────┴────────────────┐
                    ↓                                 ↓
linear_part    free wave V                 duhamel   operator N
                    │                                 │
                    └────────────────┬────────────────┘
                                     ↓
norms          exponents, weight w, growth factors, estimate probe
                                     │
                                     ↓
solver         u = eps V + N(F(u)): march, Picard, lifespan sweeps, fits
                                     │
                    ┌────────────────┴────────────────┐
                    ↓                                 ↓
comparison     1-D frames, xi*(eps)        residual  u_tt - Lap u = F - H
"""
