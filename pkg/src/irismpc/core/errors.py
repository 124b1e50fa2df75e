from irismpc import const


class IrisMpcError(Exception):
    """Base class for all errors raised by irismpc."""

    exit_code = const.EXIT_FAILURE


class NonUnit(IrisMpcError, ArithmeticError):
    """A Galois ring element has no multiplicative inverse."""


class InconsistentShare(IrisMpcError):
    """Replicated components held by two parties disagree."""


class TransportError(IrisMpcError):
    """A peer closed the channel, timed out or sent a malformed frame."""

    exit_code = const.EXIT_TRANSPORT


class BoundsViolation(IrisMpcError):
    """The code length and threshold constants do not fit the comparison ring."""

    exit_code = const.EXIT_BOUNDS


class ConfigMismatch(IrisMpcError):
    """Parties disagree on the protocol configuration, or the config is invalid."""

    exit_code = const.EXIT_CONFIG


class FormatError(IrisMpcError):
    """A database or share file is truncated or has a bad header."""

    exit_code = const.EXIT_CONFIG


class LeakageError(IrisMpcError):
    """A per-row value was about to be opened outside debug mode."""


def error_from_reply(name, message):
    """Rebuild an error reported by a remote party.

    Unknown names come back as plain :class:`IrisMpcError`; ``ValueError`` is
    kept as is so argument errors keep their exit code.
    """
    if name == ValueError.__name__:
        return ValueError(message)
    known = {cls.__name__: cls for cls in (IrisMpcError, *_subclasses(IrisMpcError))}
    return known.get(name, IrisMpcError)(message)


def _subclasses(cls):
    for sub in cls.__subclasses__():
        yield sub
        yield from _subclasses(sub)
