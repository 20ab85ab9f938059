"""
Exception hierarchy shared by every handrig module.

Input errors are problems with what the caller handed us (files, shapes,
configuration). Computation errors are geometric or numerical conditions
hit while building or projecting. The CLI maps the two families to exit
codes 2 and 1.
"""


class HandRigError(Exception):
    """Base class for all handrig errors."""


class InputError(HandRigError):
    """Invalid user input: files, schemas, shapes, configuration."""


class ComputationError(HandRigError):
    """A geometric or numerical precondition failed during computation."""


class SchemaError(InputError):
    """A document does not match its expected schema."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class InvalidWeightsError(InputError):
    """Skinning weight rows are negative, do not sum to one, or have the wrong width."""


class NotSkewError(ComputationError):
    """Matrix is not skew-symmetric within tolerance."""


class NotUnitError(ComputationError):
    """Axis vector is not unit length within tolerance."""


class ParallelAxesError(ComputationError):
    """Two-DOF joint axes are parallel, so the joint degenerates to one DOF."""


class DegenerateGeometryError(ComputationError):
    """Skeleton geometry does not define a joint frame (near-zero cross product)."""


class ModelMismatchError(ComputationError):
    """Segments and hand model disagree on link labels."""


class EmptySegmentWarning(UserWarning):
    """A link received no vertices during mesh segmentation."""
