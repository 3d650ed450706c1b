"""Backend selection for the hot kernels.

Imports the compiled extension (``rsl._ckern``) when present, otherwise
falls back to the pure-Python reference implementation.  Both expose the
same functions with identical semantics and identical random streams; set
``RSL_PURE=1`` to force the fallback (the parity tests and the benchmark
do this to compare backends).
"""

from __future__ import annotations

import os

if os.environ.get("RSL_PURE") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _ckern as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND

si_regular = _impl.si_regular
si_gw = _impl.si_gw
si_graph = _impl.si_graph
tree_logcent = _impl.tree_logcent
bfs_logcent_all = _impl.bfs_logcent_all
bfs_sizes = _impl.bfs_sizes
polya_fractions = _impl.polya_fractions
branching_counts = _impl.branching_counts
renewal_count = _impl.renewal_count
