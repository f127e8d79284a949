"""Online learning of decentralized linear-quadratic team decisions.

Thin wrapper around the compiled extension; see the project README for the
full API and the command-line interface.
"""

from ._teamdec import *  # noqa: F401,F403
from ._teamdec import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = _core_doc or __doc__
