"""Shared error taxonomy.

Every domain error carries a stable machine ``code`` and a default HTTP
status so the service layer can map exceptions one-to-one onto API errors.
"""

from __future__ import annotations


class EhubError(Exception):
    """Base class for all platform errors."""

    code = "INTERNAL_ERROR"
    http_status = 500


# --- configuration / network files ---------------------------------------

class ParseError(EhubError):
    code = "PARSE_ERROR"
    http_status = 400


class ValidationError(EhubError):
    code = "VALIDATION_ERROR"
    http_status = 400


class DanglingEdgeError(EhubError):
    code = "DANGLING_EDGE"
    http_status = 400


class InvalidDimension(EhubError):
    code = "INVALID_DIMENSION"
    http_status = 400


# --- simulation -----------------------------------------------------------

class OutOfHorizon(EhubError):
    code = "OUT_OF_HORIZON"
    http_status = 400


class SinkError(EhubError):
    code = "SINK_ERROR"
    http_status = 500


class ChannelClosed(EhubError):
    code = "CHANNEL_CLOSED"
    http_status = 409


# --- stations -------------------------------------------------------------

class TooManyStations(EhubError):
    code = "TOO_MANY_STATIONS"
    http_status = 400


class NotAvailable(EhubError):
    code = "NOT_AVAILABLE"
    http_status = 409


class StationFull(EhubError):
    code = "STATION_FULL"
    http_status = 409


# --- routing --------------------------------------------------------------

class NoRouteError(EhubError):
    code = "NO_ROUTE"
    http_status = 422


# --- datastore ------------------------------------------------------------

class AlreadyInitialized(EhubError):
    code = "ALREADY_INITIALIZED"
    http_status = 409


class DuplicateKey(EhubError):
    code = "DUPLICATE_KEY"
    http_status = 409


class StoreError(EhubError):
    code = "STORE_ERROR"
    http_status = 500


class SqlSyntaxError(EhubError):
    code = "SQL_SYNTAX_ERROR"
    http_status = 400


class UnknownRelation(EhubError):
    code = "UNKNOWN_RELATION"
    http_status = 400


class NotReadOnly(EhubError):
    code = "NOT_READ_ONLY"
    http_status = 400


class NoDataYet(EhubError):
    code = "NO_DATA_YET"
    http_status = 404


# --- embeddings / retrieval / generation ----------------------------------

class EmptyText(EhubError):
    code = "EMPTY_TEXT"
    http_status = 400


class ProviderError(EhubError):
    code = "PROVIDER_ERROR"
    http_status = 502


class DimensionMismatch(EhubError):
    code = "DIMENSION_MISMATCH"
    http_status = 400


class ZeroVector(EhubError):
    code = "ZERO_VECTOR"
    http_status = 400


class EmptyIndex(EhubError):
    code = "EMPTY_INDEX"
    http_status = 409


class BackendUnavailable(EhubError):
    code = "BACKEND_UNAVAILABLE"
    http_status = 502


class CassetteMiss(EhubError):
    code = "CASSETTE_MISS"
    http_status = 502


class NonSqlOutput(EhubError):
    code = "NON_SQL_OUTPUT"
    http_status = 502
