"""Peripheral spectrum and boundary products of unital quantum channels.

The package computes, for a unital completely positive map given by Kraus
operators, the part of its spectrum on the unit circle, the associated
eigenspaces, and the multiplication that turns their span into an operator
algebra.  Three independent constructions of that multiplication (spectral
projectors, Cesaro averages of channel powers, compressions inside a
repeated Stinespring dilation) are implemented and cross checked.
"""

from .boundary import (BoundaryElement, PeripheralBoundary, boundary_table,
                       cesaro_product, decompose_peripheral, limit_diagnostic,
                       peripheral_product, product_general)
from .channel import (KrausChannel, apply, apply_predual, invariant_state,
                      power, superoperator, tensor, validate)
from .errors import (AlmostPeriodError, CapExceededError, ChannelFormatError,
                     DefectiveEigenvalueError, EigensolverError, PeriphError,
                     PeripheralSpanError, ToleranceConflictError,
                     ValidationError)
from .spectral import (almost_period, eigenspace, peripheral_spectrum,
                       semisimplicity_report, spectral_projection)

__all__ = [
    "AlmostPeriodError",
    "BoundaryElement",
    "CapExceededError",
    "ChannelFormatError",
    "DefectiveEigenvalueError",
    "EigensolverError",
    "KrausChannel",
    "PeriphError",
    "PeripheralBoundary",
    "PeripheralSpanError",
    "ToleranceConflictError",
    "ValidationError",
    "almost_period",
    "apply",
    "apply_predual",
    "boundary_table",
    "cesaro_product",
    "decompose_peripheral",
    "eigenspace",
    "invariant_state",
    "limit_diagnostic",
    "peripheral_product",
    "peripheral_spectrum",
    "power",
    "product_general",
    "semisimplicity_report",
    "spectral_projection",
    "superoperator",
    "tensor",
    "validate",
]

__version__ = "0.1.0"
