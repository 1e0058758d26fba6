"""Exception types shared across the package."""

from __future__ import annotations


class TokenGraphError(Exception):
    """Base class for every error raised by this package."""


class ParseError(TokenGraphError):
    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class SizeError(TokenGraphError):
    """An enumeration bound or guard was exceeded."""


class DomainError(TokenGraphError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(TokenGraphError):
    """A caller-supplied object does not satisfy the stated precondition."""


class StructureError(TokenGraphError):
    """The input does not have the structure promised to the pipeline.

    ``stage`` names the pipeline step that noticed, ``witness`` holds the
    offending vertices or edges.
    """

    def __init__(self, stage: str, message: str, witness=None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.witness = witness
