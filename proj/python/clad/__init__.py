"""Class-label-aware graph anomaly detection."""

try:
    from ._clad import *  # noqa: F401,F403  (installed package layout)
    from ._clad import __doc__ as _doc
except ImportError:  # build-tree layout: _clad sits next to the package on sys.path
    from _clad import *  # noqa: F401,F403
    from _clad import __doc__ as _doc

__doc__ = _doc
__version__ = "0.1.0"
