"""Exception hierarchy shared by all ctclab modules."""


class CTCLabError(Exception):
    """Base class. ``kind`` is the machine-readable tag used by the CLI."""

    kind = "error"

    def to_dict(self):
        return {"error": self.kind, "message": str(self)}


class DimensionError(CTCLabError, ValueError):
    kind = "dimension"


class ContractError(CTCLabError, ValueError):
    kind = "contract"


class SolverError(CTCLabError, RuntimeError):
    kind = "solver"


class DomainError(CTCLabError, ValueError):
    kind = "domain"


class TruncationError(CTCLabError, ValueError):
    kind = "truncation"


class CriticalRayError(CTCLabError, ValueError):
    """A characteristic passes too close to an endpoint of the removed strips."""

    kind = "critical_ray"


class AmbiguityError(CTCLabError, ValueError):
    kind = "ambiguity"
