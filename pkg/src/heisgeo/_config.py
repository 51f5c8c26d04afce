from __future__ import annotations

import os

TOL_ENV = "HEIS_GEO_TOL"


def tolerance(default: float) -> float:
    """Return the check tolerance, honouring the ``HEIS_GEO_TOL`` override."""
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return default
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{TOL_ENV} must be a positive number, got {raw!r}")
    return value
