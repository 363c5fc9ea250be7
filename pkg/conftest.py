import os
import sys

# Allow running pytest from a source checkout without installing the package.
_SRC = os.path.join(os.path.dirname(__file__), "src")
try:
    import productmix  # noqa: F401
except ImportError:
    sys.path.insert(0, _SRC)
