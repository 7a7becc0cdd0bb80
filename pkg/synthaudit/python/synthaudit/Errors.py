####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################


class SynthAuditError(Exception):
    "Base class for every error raised by synthaudit on bad inputs"


class IngestError(SynthAuditError, ValueError):
    "CSV ingestion and schema inference failures"


class MissingFileError(IngestError):
    pass


class EmptyInputError(IngestError):
    pass


class RaggedRowsError(IngestError):
    pass


class ParseFailure(IngestError):
    pass


class SchemaViolation(IngestError):
    pass


class InsufficientRows(SynthAuditError, ValueError):
    pass


class EncodingError(SynthAuditError, ValueError):
    pass


class DegenerateDimension(SynthAuditError, ValueError):
    pass


class ShapeMismatch(SynthAuditError, ValueError):
    pass


class AttackError(SynthAuditError, ValueError):
    pass


class EncoderMismatch(AttackError):
    pass


class MetricError(SynthAuditError, ValueError):
    pass


class ConfigError(SynthAuditError, ValueError):
    """Invalid experiment configuration

    Args:
        path: JSON-path of the offending field, e.g. ``$.attacks[1].k``
        message: what is wrong with it
    """
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
