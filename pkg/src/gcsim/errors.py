"""Exception types shared across the toolkit."""


class GcsimError(Exception):
    """Base class for all gcsim errors."""


class ConfigurationError(GcsimError):
    """An experiment or model parameter violates a structural constraint."""


class CodeConstructionError(GcsimError):
    """Code generation failed verification after the retry budget."""


class NotEnoughResultsError(GcsimError):
    """Fewer codewords received than the decoding threshold."""


class DecodeFailureError(GcsimError):
    """A decoding solve exceeded the residual tolerance; the code is broken."""


class NotDecodableError(GcsimError):
    """One or more clusters are below the decoding threshold."""

    def __init__(self, clusters):
        self.clusters = tuple(clusters)
        super().__init__(
            "clusters below decoding threshold: %s" % list(self.clusters)
        )


class SchemaError(GcsimError):
    """A records CSV does not match the documented schema."""
