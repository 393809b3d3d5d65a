"""Python face of the requirements-to-formulation pipeline core."""

try:
    from ._apf import *  # noqa: F401,F403  (installed layout)
    from . import _apf as _impl
except ImportError:  # build-tree layout: the module sits next to this package
    from _apf import *  # noqa: F401,F403
    import _apf as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
