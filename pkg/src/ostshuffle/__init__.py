"""One-sided transposition shuffle on the generalized symmetric group G_{m,n}."""

from .errors import CapacityError, DimensionError, NotConvergedError, OSTError
from .group import (
    GroupElement,
    GroupParams,
    act_on_card,
    compose,
    identity,
    inverse,
    project,
    rank,
    unrank,
)
from .shuffle import Generator, GeneratorDistribution, generator_to_element, identity_mass, ost_generators

__version__ = "0.1.0"
