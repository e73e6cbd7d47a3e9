"""Exception hierarchy shared across the engine, CLI and service.

Every error carries a stable machine-readable ``code`` so the HTTP layer
and the CLI can emit it without string-matching messages.
"""


class CutawayError(Exception):
    code = "error"

    def to_payload(self) -> dict:
        return {"code": self.code, "message": str(self)}


class TranscriptFormatError(CutawayError):
    code = "bad_transcript"


class EditSetFormatError(CutawayError):
    code = "bad_editset"


class ArtifactFormatError(CutawayError):
    code = "bad_artifact"


class TimeOutOfRangeError(CutawayError):
    code = "time_out_of_range"


class StopwordInputError(CutawayError):
    code = "stopword_input"


class DimensionMismatchError(CutawayError):
    code = "dimension_mismatch"


class SingleClassError(CutawayError):
    code = "single_class"


class ThresholdUnattainableError(CutawayError):
    code = "threshold_unattainable"


class DataLeakageError(CutawayError):
    code = "data_leakage"


class VideoMismatchError(CutawayError):
    code = "video_mismatch"


class OverlapError(CutawayError):
    code = "overlap"


class UnknownInsertionError(CutawayError):
    code = "unknown_insertion"


class RevisionConflictError(CutawayError):
    code = "revision_conflict"


class ProviderError(CutawayError):
    code = "provider_error"


class ProviderUnreachableError(ProviderError):
    code = "provider_unreachable"


class ProviderAuthError(ProviderError):
    code = "provider_auth"


class ConfigError(CutawayError):
    code = "bad_config"


class NotFoundError(CutawayError):
    code = "not_found"


class SourceUnconfiguredError(CutawayError):
    code = "source_unconfigured"
