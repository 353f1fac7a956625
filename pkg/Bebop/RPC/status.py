"""Call status codes and their HTTP mapping."""

from enum import IntEnum
from typing import Dict


class StatusCode(IntEnum):
    """0-16 follow the gRPC numbering; 17-255 are application defined."""

    OK = 0
    CANCELLED = 1
    UNKNOWN = 2
    INVALID_ARGUMENT = 3
    DEADLINE_EXCEEDED = 4
    NOT_FOUND = 5
    ALREADY_EXISTS = 6
    PERMISSION_DENIED = 7
    RESOURCE_EXHAUSTED = 8
    FAILED_PRECONDITION = 9
    ABORTED = 10
    OUT_OF_RANGE = 11
    UNIMPLEMENTED = 12
    INTERNAL = 13
    UNAVAILABLE = 14
    DATA_LOSS = 15
    UNAUTHENTICATED = 16


APPLICATION_STATUS_MIN = 17

_HTTP_STATUS: Dict[int, int] = {
    StatusCode.OK: 200,
    StatusCode.INVALID_ARGUMENT: 400,
    StatusCode.DEADLINE_EXCEEDED: 504,
    StatusCode.NOT_FOUND: 404,
    StatusCode.PERMISSION_DENIED: 403,
    StatusCode.UNIMPLEMENTED: 501,
    StatusCode.INTERNAL: 500,
}


def http_status(code: int) -> int:
    """HTTP status for a call status; unmapped codes become 500."""
    return _HTTP_STATUS.get(code, 500)


def status_name(code: int) -> str:
    try:
        return StatusCode(code).name
    except ValueError:
        return f"APP_{code}"


__all__ = ["APPLICATION_STATUS_MIN", "StatusCode", "http_status", "status_name"]
