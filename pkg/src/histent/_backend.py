"""Kernel selection.

The compiled ``_core`` extension is used when importable; otherwise the
numpy implementation in ``_pycore``. Set ``HISTENT_PURE_PYTHON=1`` to
force the fallback.
"""
import logging
import os

logger = logging.getLogger(__name__)


def _load():
    if os.environ.get("HISTENT_PURE_PYTHON", "") not in ("", "0"):
        from . import _pycore
        return _pycore
    try:
        from . import _core
    except ImportError:  # extension not built
        logger.debug("compiled kernels unavailable; using numpy fallback")
        from . import _pycore
        return _pycore
    return _core


kernels = _load()
BACKEND = kernels.NAME
