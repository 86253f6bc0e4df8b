"""Exception hierarchy shared by all cyclescan modules."""


class CyclescanError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CyclescanError):
    """Input file violates the expected CSV contract."""


class EmptySeries(CyclescanError):
    """Fewer than two valid price rows."""


class NonPositivePrice(CyclescanError):
    """Closure price is zero or negative; log return undefined."""


class SeriesTooShort(CyclescanError):
    """Series length insufficient for the requested analysis."""


class RangeTooNarrow(CyclescanError):
    """Fit range contains too few grid points for a stable slope."""


class ZeroFluctuation(CyclescanError):
    """sigma(n) = 0 inside the fit range; log-log fit undefined."""


class EmptyBand(CyclescanError):
    """Scale band does not overlap the wavelet grid."""


class SampleTooSmall(CyclescanError):
    """Statistical test requires a larger sample."""


class DegenerateVector(CyclescanError):
    """Hurst vector coincides with the reference vector; no direction."""


class IncompleteVector(CyclescanError):
    """Hurst vector has missing components."""


class InvalidSpec(CyclescanError):
    """Synthetic-signal specification violates its invariants."""


class ConfigError(CyclescanError):
    """Pipeline configuration is inconsistent or incomplete."""


class StageError(CyclescanError):
    """Pipeline stage failure, tagged with market and stage name."""

    def __init__(self, market_id: str, stage: str, cause: Exception):
        self.market_id = market_id
        self.stage = stage
        self.cause = cause
        super().__init__(f"[market={market_id} stage={stage}] {cause}")
