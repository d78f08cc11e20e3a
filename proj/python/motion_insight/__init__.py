"""Motion analytics for long motion-capture recordings."""

import json

from ._core import (
    MotionInsightError,
    compute_series,
    detect_freezes,
    simplify,
    synthesize,
)
from ._core import Analysis as _Analysis

__all__ = [
    "Analysis",
    "ApiError",
    "MotionInsightError",
    "compute_series",
    "detect_freezes",
    "simplify",
    "synthesize",
]


class ApiError(Exception):
    def __init__(self, status, code, message):
        super().__init__(f"{status} {code}: {message}")
        self.status = status
        self.code = code
        self.message = message


def _pairs(params):
    if params is None:
        return []
    items = params.items() if isinstance(params, dict) else params
    out = []
    for key, value in items:
        if isinstance(value, (list, tuple)):
            out.extend((key, str(v)) for v in value)
        elif isinstance(value, bool):
            out.append((key, "true" if value else "false"))
        else:
            out.append((key, str(value)))
    return out


class Analysis(_Analysis):
    """A loaded dataset with its derived series, events and freezes."""

    def get(self, path, params=None):
        """Decoded JSON for an API path; raises ApiError on a non-200 status."""
        if not path.startswith("/api/"):
            path = "/api/v1/" + path.lstrip("/")
        status, body = self.query(path, _pairs(params))
        doc = json.loads(body)
        if status != 200:
            raise ApiError(status, doc["error"]["code"], doc["error"]["message"])
        return doc

    def report_dict(self, action=None, filters=()):
        return json.loads(self.report(action, list(filters)))
