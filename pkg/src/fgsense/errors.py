"""Exception hierarchy shared by the whole pipeline.

Every error carries a stable ``code`` (its class name) so the CLI can emit
machine-parsable ``ERROR <code>: <message>`` lines.
"""

from __future__ import annotations


class FgsenseError(Exception):
    """Base class for all data/configuration errors raised by fgsense."""

    @property
    def code(self) -> str:
        return type(self).__name__


# audio_io
class MalformedWav(FgsenseError):
    pass


class UnsupportedFormat(FgsenseError):
    pass


class WrongSampleRate(FgsenseError):
    pass


# noise augmentation
class ZeroPowerSignal(FgsenseError):
    pass


class SampleRateMismatch(FgsenseError):
    pass


class EmptyCorpus(FgsenseError):
    pass


# embedding store
class DimensionMismatch(FgsenseError):
    pass


class CorruptStore(FgsenseError):
    pass


class ManifestMismatch(FgsenseError):
    pass


class KindMismatch(FgsenseError):
    pass


# clustering
class DegenerateInput(FgsenseError):
    pass


class EigensolverFailure(FgsenseError):
    pass


# cluster labeling
class NotBinary(FgsenseError):
    pass


class EmptyCluster(FgsenseError):
    pass


# evaluation
class LengthMismatch(FgsenseError):
    pass


class EmptyInput(FgsenseError):
    pass


class DegenerateMarginals(FgsenseError):
    pass


class TooFewGroups(FgsenseError):
    pass


# synthetic benchmark
class InvalidConfig(FgsenseError):
    pass
