"""Exception types shared by every mechanism."""


class SdcredError(Exception):
    """Base class for library errors."""


class InvalidArgument(SdcredError, ValueError):
    """An argument violates an operation precondition."""


class DecodeError(SdcredError, ValueError):
    """Bytes or JSON could not be decoded into the expected object."""


class InvalidWitness(SdcredError):
    """A prover was handed a witness that does not satisfy its relation."""


class UnverifiableInput(SdcredError):
    """A transcript handed to a conversion routine does not verify."""


class ThresholdExceedsValue(SdcredError):
    """A HashWire proof was requested for a threshold above the committed value."""


class VerificationError(SdcredError):
    """Verification rejected its input.

    ``reason`` is a short machine-readable token such as ``"pairing-mismatch"``.
    """

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


class UnknownMechanism(SdcredError, KeyError):
    """A mechanism tag is not present in the registry."""

    def __str__(self) -> str:
        return Exception.__str__(self)
