"""Graph-based IR kit: GXL I/O, verification, optimization, instruction selection."""

try:
    from ._irkit import *  # noqa: F401,F403
    from ._irkit import __doc__  # noqa: F401
except ImportError:  # pragma: no cover - development builds put _irkit on sys.path
    from _irkit import *  # noqa: F401,F403
    from _irkit import __doc__  # noqa: F401

__version__ = "0.1.0"
