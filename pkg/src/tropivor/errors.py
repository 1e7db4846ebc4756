"""Structured errors shared by every module.

Each error carries a short ``kind`` tag and a tuple of witnesses (the
offending sites, indices or values) so that the CLI can serialize it.
"""
from __future__ import annotations


class TropivorError(Exception):
    kind = "error"
    exit_code = 3

    def __init__(self, message: str, *witnesses):
        super().__init__(message)
        self.message = message
        self.witnesses = witnesses

    def to_dict(self) -> dict:
        from .serialize import to_jsonable

        return {
            "kind": self.kind,
            "message": self.message,
            "witnesses": [to_jsonable(w) for w in self.witnesses],
        }


class ParseError(TropivorError):
    kind = "parse"
    exit_code = 2


class DimensionMismatch(TropivorError):
    kind = "dimension_mismatch"


class ZeroVectorError(TropivorError):
    kind = "zero_vector"


class NotAFacet(TropivorError):
    kind = "not_a_facet"


class PreconditionError(TropivorError):
    kind = "precondition"


class GeneralPositionError(TropivorError):
    kind = "general_position"


class DegeneracyError(TropivorError):
    kind = "degeneracy"


class GuardExceeded(TropivorError):
    kind = "guard"


class VerificationError(TropivorError):
    kind = "verification"
    exit_code = 4
