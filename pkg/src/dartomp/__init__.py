"""dartomp: data-aware rewriting for OpenMP target offloading.

Analyzes C programs that already offload kernels with ``#pragma omp target``
family directives, decides which host/device data movements are actually
required, and rewrites the source with ``target data`` regions, map clauses,
``target update`` directives, and ``firstprivate`` scalars.  A companion
simulator accounts transfer calls and bytes under OpenMP reference-count
semantics and flags stale reads.
"""

__version__ = "0.1.0"
