"""Exception hierarchy for the qbd_sim package."""


class QbdSimError(Exception):
    """Base class for all errors raised by qbd_sim."""


class ParameterError(QbdSimError, ValueError):
    """A physical parameter is outside its admissible domain."""


class ContractError(QbdSimError, ValueError):
    """An internal data invariant is violated (e.g. an unnormalized
    probability vector passed where a normalized one is required)."""


class TruncationError(QbdSimError):
    """The photon-number truncation is too small for the requested
    computation; rerun with a larger ``n_max``."""


class IntegrationError(QbdSimError):
    """Time integration of the master equation failed."""


class ImpossibleOutcomeError(QbdSimError):
    """A Bayesian filter update met a detection outcome to which the
    current belief assigns (numerically) zero probability.  Signals a
    diverged filter or a detection record inconsistent with the model."""


class UsageError(QbdSimError):
    """Invalid command line arguments or configuration input."""
