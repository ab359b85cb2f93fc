"""Exception types shared across the package."""


class MddwError(Exception):
    """Base class for all errors raised by this package."""


class DecodeError(MddwError, ValueError):
    """Malformed encoding of a scalar, group element or signature."""


class PairingUnavailable(MddwError):
    """A pairing was requested on a group that has none."""


class WrongBlockLength(MddwError, ValueError):
    pass


class WrongLength(DecodeError):
    pass


class TokenOutOfRange(MddwError, ValueError):
    pass


class EmptyVerifierSet(MddwError, ValueError):
    pass


class VerifierNotDesignated(MddwError):
    """Raised only by helpers that need a designated key; verify returns False instead."""


class LowEntropyModel(MddwError):
    """Rejection sampling exceeded its attempt cap for one carrier bit."""


class BackendUnsupported(MddwError):
    pass


class IncompleteSecretSet(MddwError, ValueError):
    """Designated-set forging was given secrets that do not cover the designated set."""


class Transport(MddwError):
    """HTTP model endpoint unreachable or returned a non-2xx status."""


class BadResponse(MddwError):
    pass
