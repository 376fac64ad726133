"""Backend selection for the hot loops.

The compiled extension ``dacnet._kernels`` is used when importable; otherwise,
or when the environment variable ``DACNET_PURE_PYTHON`` is set to a non-empty
value other than ``0``, the pure-Python module ``dacnet._pykernels`` is used.
``BACKEND`` names the active one.
"""

import os

from . import _pykernels as pure

if os.environ.get("DACNET_PURE_PYTHON", "0") not in ("", "0"):
    _impl = pure
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = pure
        BACKEND = "python"

bfs_from = _impl.bfs_from
all_pairs_bfs = _impl.all_pairs_bfs
multi_source_bfs = _impl.multi_source_bfs
lasso_cd = _impl.lasso_cd

try:
    from . import _kernels as compiled
except ImportError:
    compiled = None

__all__ = ["BACKEND", "bfs_from", "all_pairs_bfs", "multi_source_bfs",
           "lasso_cd", "pure", "compiled"]
