"""Hot numeric kernels with selectable backend.

The numba backend is used when importable; set SPIKEDTENSOR_DISABLE_NUMBA=1
to force the pure-numpy reference path.  Both backends expose the same
functions; per-backend output is deterministic, and the two agree to
floating round-off (asserted in the test suite).
"""

from __future__ import annotations

import os

from . import reference

_disabled = os.environ.get("SPIKEDTENSOR_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

if not _disabled:
    try:
        from . import jit as _backend
        BACKEND = "numba"
    except ImportError:
        _backend = reference
        BACKEND = "numpy"
else:
    _backend = reference
    BACKEND = "numpy"

normal_stream = _backend.normal_stream
plain_stieltjes_iteration = _backend.plain_stieltjes_iteration
mode_contract = _backend.mode_contract
pair_contract = _backend.pair_contract
full_contract = _backend.full_contract
power_sweeps = _backend.power_sweeps

__all__ = [
    "BACKEND",
    "normal_stream",
    "plain_stieltjes_iteration",
    "mode_contract",
    "pair_contract",
    "full_contract",
    "power_sweeps",
    "reference",
]
