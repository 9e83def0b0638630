"""Run dependency check at import time; print installation instructions and stop if deps missing."""

import platform
import sys

missing_deps = []
try:
    import numpy  # noqa: F401
except ImportError:
    missing_deps.append("numpy")
try:
    from scipy.sparse.csgraph import connected_components  # noqa: F401
except ImportError:
    missing_deps.append("scipy")
try:
    import drawsvg  # noqa: F401
except ImportError:
    missing_deps.append("drawsvg")

if missing_deps:
    print("🚨 Missing required dependencies", file=sys.stderr)
    print(f"The following Python packages are required but not installed: {', '.join(missing_deps)}", file=sys.stderr)
    print("To install dependencies, run:", file=sys.stderr)
    system = platform.system().lower()
    if system == "darwin":
        print("  pip3 install -r requirements.txt", file=sys.stderr)
        print("Or use Homebrew (recommended for macOS):", file=sys.stderr)
        print("  brew install python3 && pip3 install -r requirements.txt", file=sys.stderr)
    elif system == "linux":
        print("  pip3 install -r requirements.txt", file=sys.stderr)
        print("Or install system packages first:", file=sys.stderr)
        print("  sudo apt install python3-pip && pip3 install -r requirements.txt", file=sys.stderr)
    else:
        print("  pip install -r requirements.txt", file=sys.stderr)
    sys.exit(1)
