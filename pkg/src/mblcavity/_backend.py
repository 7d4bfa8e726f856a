"""Select the compiled kernel module, falling back to the numpy versions.

Set ``MBLCAVITY_PURE_PYTHON=1`` to force the fallback.
"""

import logging
import os

log = logging.getLogger(__name__)

_FORCE_PURE = os.environ.get("MBLCAVITY_PURE_PYTHON", "").lower() in ("1", "true", "yes")

if _FORCE_PURE:
    from . import _fallback as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "compiled"
    except ImportError:  # extension not built
        log.debug("compiled kernels unavailable, using numpy fallback")
        from . import _fallback as kernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
