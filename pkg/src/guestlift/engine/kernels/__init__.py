"""Similarity kernels: compiled extension when available, pure Python otherwise.

Set GUESTLIFT_KERNEL=python (or =compiled) to force a backend; by default the
compiled extension is used when the build produced it.
"""

import os

COSINE = 0
PEARSON = 1
ADJUSTED = 2

_forced = os.environ.get("GUESTLIFT_KERNEL", "").strip().lower()
if _forced == "python":
    from . import pysim as _impl

    BACKEND = "python"
elif _forced == "compiled":
    from . import _simcore as _impl  # raises ImportError when the build skipped it

    BACKEND = "compiled"
else:
    try:
        from . import _simcore as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import pysim as _impl

        BACKEND = "python"

pairwise_sims = _impl.pairwise_sims

__all__ = ["ADJUSTED", "BACKEND", "COSINE", "PEARSON", "pairwise_sims"]
