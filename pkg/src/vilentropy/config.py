"""Resource budgets, overridable through environment variables."""
from __future__ import annotations

import os

_DEFAULTS = {
    # points in one exact Vilenkin cylinder sum
    "VILENTROPY_INTEGRATION_BUDGET": 2**20,
    # points in a tensor product quadrature grid
    "VILENTROPY_GRID_BUDGET": 2**24,
    # bounding-box points scanned by brute-force ball counting
    "VILENTROPY_BALL_BUDGET": 10**9,
    # elementary steps allowed when counting lattice layers
    "VILENTROPY_LATTICE_BUDGET": 2**28,
    # lambda evaluations allowed per dyadic level search
    "VILENTROPY_SCAN_BUDGET": 10**7,
    # explicit enumeration of layer members
    "VILENTROPY_ENUM_BUDGET": 10**7,
}


def budget(name: str) -> int:
    key = name if name.startswith("VILENTROPY_") else f"VILENTROPY_{name.upper()}_BUDGET"
    raw = os.environ.get(key)
    if raw is None:
        return int(_DEFAULTS[key])
    return int(float(raw))


def all_budgets() -> dict[str, int]:
    return {key: budget(key) for key in _DEFAULTS}
