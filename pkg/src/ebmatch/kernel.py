"""Backend selection for the matching hot loop.

Imports the compiled kernel when available; falls back to the pure-Python
twin.  Set EBMATCH_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import functools
import os

from .model import MatchingStructure

if os.environ.get("EBMATCH_PURE_PYTHON") == "1":
    from . import _kernel_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernel as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernel_py as _impl

        BACKEND = "python"

POLICY_CODES = {"fcfs": 0, "lcfs": 1, "rand": 2, "ml": 3, "ms": 4}

final_buffer = _impl.final_buffer

# the bitmask encoding caps class counts; larger structures must use the
# traced engine
MAX_CLASSES = 64


@functools.lru_cache(maxsize=None)
def masks(structure: MatchingStructure) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Per-class neighbor bitmasks (index 0 unused)."""
    if max(structure.n_customers, structure.n_servers) > MAX_CLASSES:
        raise ValueError("structure too large for the bitmask kernel")
    s_masks = [0]
    for c in structure.customers:
        m = 0
        for s in structure.S(c):
            m |= 1 << (s - 1)
        s_masks.append(m)
    c_masks = [0]
    for s in structure.servers:
        m = 0
        for c in structure.C(s):
            m |= 1 << (c - 1)
        c_masks.append(m)
    return tuple(s_masks), tuple(c_masks)
