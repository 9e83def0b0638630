#!/usr/bin/env python3
"""
Bratteli Surfaces
Turns weighted, ordered bi-infinite Bratteli diagrams into adic maps, interval
exchanges and flat surfaces, and evaluates renormalization and ergodicity on them

Features:
- Example families (odometers, Chacon, staircases, Pascal, symmetric, explosive, ...)
- Exact cutting-and-stacking interval exchanges
- Flat surfaces with vertical/horizontal flow and Teichmüller deformation
- Renormalization shift with a sampled functoriality check
- Summability criterion for ergodicity with certified verdicts
"""

import sys

# Run dependency check first (prints install instructions and exits if deps missing)
import adicsurf.deps_check  # noqa: F401

from adicsurf.cli import main

sys.exit(main())
