"""Kernel backend selection.

Prefers the compiled extension ``darbouxforge._speedups`` and falls back to
the pure-Python implementation.  Set ``DARBOUX_FORGE_KERNEL=py`` (or ``cy``)
to force a backend; forcing ``cy`` when the extension was not built raises.
``BACKEND`` records which twin is active.
"""

from __future__ import annotations

import os

from . import _kernel_py

_requested = os.environ.get("DARBOUX_FORGE_KERNEL", "").strip().lower()
if _requested not in ("", "py", "cy"):
    raise RuntimeError(
        f"DARBOUX_FORGE_KERNEL must be 'py' or 'cy', got {_requested!r}"
    )

if _requested == "py":
    _impl = _kernel_py
    BACKEND = "py"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "cy"
    except ImportError:
        if _requested == "cy":
            raise RuntimeError(
                "DARBOUX_FORGE_KERNEL=cy but the compiled kernel is not available"
            ) from None
        _impl = _kernel_py
        BACKEND = "py"

merge_monomials = _impl.merge_monomials
monomial_from_pairs = _impl.monomial_from_pairs
mul_terms = _impl.mul_terms
add_terms = _impl.add_terms
