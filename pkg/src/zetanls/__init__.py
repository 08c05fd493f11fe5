"""Pseudo-spectral simulation of the zeta-damped Schrodinger equation on a 2-torus."""
from .dynamics import Equation, StepperConfig, Variant, evolve
from .field import ComplexField, TorusGrid
from .specfun import gain, zeta, zeta_prime

__all__ = ["ComplexField", "Equation", "StepperConfig", "TorusGrid", "Variant", "evolve",
           "gain", "zeta", "zeta_prime"]
__version__ = "0.1.0"
