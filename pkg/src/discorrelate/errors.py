"""Exception types raised by the simulator.

Every error carries a short machine-readable ``code`` so the CLI can emit
structured error records without string matching.
"""


class DiscorrelationError(Exception):
    code = "error"


class SpecError(DiscorrelationError, ValueError):
    """Invalid user input: bad parameters, unknown scenario, bad mode set."""

    code = "bad_spec"


class NumericalError(DiscorrelationError, ArithmeticError):
    code = "numerical"


class ZeroNorm(NumericalError):
    """Norm or trace vanished, e.g. heralding on an impossible outcome."""

    code = "zero_norm"


class TruncationOverflow(NumericalError):
    """A populated photon-number sector would scatter above the Fock cutoff."""

    code = "truncation_overflow"


class TailTooLarge(NumericalError):
    """The truncation discards more probability than the configured bound."""

    code = "tail_too_large"


class DegenerateBeamSplitter(NumericalError):
    code = "degenerate_beam_splitter"


class DegenerateReference(NumericalError):
    code = "degenerate_reference"


class RankOverflow(SpecError):
    code = "rank_overflow"


class BadModeSet(SpecError):
    code = "bad_mode_set"


class OutOfRange(SpecError):
    code = "out_of_range"
