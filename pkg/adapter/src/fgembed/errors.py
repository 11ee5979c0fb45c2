from __future__ import annotations


class FgembedError(Exception):
    @property
    def code(self) -> str:
        return type(self).__name__


class ModelLoadFailure(FgembedError):
    pass


class DimMismatch(FgembedError):
    pass


class BadAudio(FgembedError):
    pass
