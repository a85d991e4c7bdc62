import os
import sys

_pkg_dir = os.environ.get("PADKIT_PKG_DIR")
if _pkg_dir and _pkg_dir not in sys.path:
    sys.path.insert(0, _pkg_dir)
