import sys

import adicsurf.deps_check  # noqa: F401

from adicsurf.cli import main

sys.exit(main())
