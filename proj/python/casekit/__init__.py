"""Casing-robust sequence tagging toolkit."""

try:
    from casekit._casekit import *  # noqa: F401,F403
    from casekit._casekit import __doc__  # noqa: F401
except ImportError:
    # build-tree layout: _casekit.so sits directly on sys.path
    from _casekit import *  # noqa: F401,F403
    from _casekit import __doc__  # noqa: F401

__version__ = "0.1.0"
