# File: featurecodec/exceptions.py

"""Typed errors shared by every codec app.

Each error carries a ``category`` (its class name) so the CLI can report a
single machine-parsable line.
"""


class CodecError(Exception):
    """Base class for all codec failures"""

    @property
    def category(self):
        return type(self).__name__


class InvalidTensor(CodecError):
    pass


class InvalidInput(CodecError):
    pass


class InvalidConfig(CodecError):
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class UnsupportedGeometry(CodecError):
    pass


class InvalidStats(CodecError):
    pass


# ========== STREAM ERRORS ==========
class NotAStream(CodecError):
    pass


class TruncatedStream(CodecError):
    pass


class CorruptStream(CodecError):
    pass


class MuxError(CodecError):
    pass


# ========== INNER CODEC ERRORS ==========
class UnknownCodec(CodecError):
    pass


class DecodeError(CodecError):
    pass


class ExternalCodecError(CodecError):
    def __init__(self, message, returncode=None, stderr=''):
        super().__init__(message)
        self.returncode = returncode
        self.stderr = stderr


# ========== METRIC ERRORS ==========
class NoOverlap(CodecError):
    pass


class InsufficientPoints(CodecError):
    pass
