"""Kernel selection: compiled extension when available, pure Python otherwise.

Set MODALTEAM_PURE_PY=1 to force the fallback (used by the benchmark and by
tests that compare the two implementations).
"""

import os

if os.environ.get("MODALTEAM_PURE_PY"):
    from ._kernels_py import *  # noqa: F401,F403

    BACKEND = "python"
else:
    try:
        from ._kernels_c import *  # noqa: F401,F403

        BACKEND = "c"
    except ImportError:
        from ._kernels_py import *  # noqa: F401,F403

        BACKEND = "python"
