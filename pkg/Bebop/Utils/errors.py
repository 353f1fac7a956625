"""Root exception for every error raised by the Bebop package."""

from typing import Any, Dict, Optional


class BebopError(Exception):
    """Base exception carrying a message and structured details."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(message)
