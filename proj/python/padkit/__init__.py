"""Face attack-detection training toolkit: python bindings for the C++ core."""

import os
import sys

try:
    from ._core import *  # noqa: F401,F403
    from . import _core as _core  # noqa: F401
except ImportError:  # running against a plain CMake build tree
    _ext_dir = os.environ.get("PADKIT_EXT_DIR")
    if not _ext_dir:
        raise
    sys.path.insert(0, _ext_dir)
    import _core  # noqa: F401

    sys.modules[__name__ + "._core"] = _core
    for _name in dir(_core):
        if not _name.startswith("_"):
            globals()[_name] = getattr(_core, _name)

__all__ = [name for name in dir(_core) if not name.startswith("_")]
