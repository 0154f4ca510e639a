"""Double-double backend selection.

Prefers the compiled extension; falls back to the pure-Python twin when the
extension is not built. Both expose the same names and produce bit-identical
results (see benchmarks/bench_ddcg.py for the speed gap).
"""

import logging

logger = logging.getLogger(__name__)

try:
    from cglab import _ddcore as _impl
except ImportError:  # pragma: no cover - depends on the build
    from cglab import _ddcore_py as _impl

    logger.warning(
        "cglab._ddcore extension not built; using the pure-Python "
        "double-double kernels (slow)"
    )

BACKEND = _impl.BACKEND

two_sum = _impl.two_sum
quick_two_sum = _impl.quick_two_sum
two_prod = _impl.two_prod
dd_add = _impl.dd_add
dd_sub = _impl.dd_sub
dd_add_d = _impl.dd_add_d
dd_mul = _impl.dd_mul
dd_mul_d = _impl.dd_mul_d
dd_div = _impl.dd_div
dd_div_d = _impl.dd_div_d
dd_sqrt = _impl.dd_sqrt
cg_diagonal = _impl.cg_diagonal
cg_dense = _impl.cg_dense
