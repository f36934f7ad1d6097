"""Saddle connections, bounded Teichmueller geodesics, and rational billiards.

The compiled core lives in ``_flatlab``; this package re-exports it. When the
module is built in place by CMake, ``_flatlab`` sits next to the build tree
and is importable directly; installed wheels place it inside this package.
"""

try:
    from ._flatlab import *  # noqa: F401,F403
    from ._flatlab import __version__  # noqa: F401
except ImportError:  # pragma: no cover - in-tree builds
    from _flatlab import *  # noqa: F401,F403
    from _flatlab import __version__  # noqa: F401
