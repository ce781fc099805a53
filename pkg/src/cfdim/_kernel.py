"""Pick the continued-fraction kernel at import time.

The compiled GMP kernel is preferred; ``CFDIM_PURE_PYTHON=1`` forces the
pure-Python twin.  ``BACKEND`` records which one is live.
"""

import os

if os.environ.get("CFDIM_PURE_PYTHON", "") not in ("", "0"):
    from ._purekernel import cf_digit_sum, cf_expand

    BACKEND = "python"
else:
    try:
        from ._cfkernel import cf_digit_sum, cf_expand

        BACKEND = "gmp"
    except ImportError:
        from ._purekernel import cf_digit_sum, cf_expand

        BACKEND = "python"

__all__ = ["cf_expand", "cf_digit_sum", "BACKEND"]
