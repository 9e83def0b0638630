"""Application constants and configuration."""

from fractions import Fraction

DEFAULT_DEPTH = 8
MAX_REFINE_DEPTH = 64
REFINE_STEP = 8

TUNNEL_SEARCH_BOUND = 16
TELESCOPE_MASS_RATIO = Fraction(1, 2)
COMPONENT_TAIL_FRACTION = Fraction(1, 2)
COMPONENT_LOOKAHEAD = 2

DEFAULT_ETA = Fraction(1, 10)
EPSILON_POLICIES = ("maximal", "proof")

# float mode only; relative to the ambient interval length
FLOAT_HIT_TOLERANCE = 2.0 ** -40

DEFAULT_SAMPLES = 100
DEFAULT_SEED = 0
SAMPLE_DENOMINATOR = 1000003
MAX_WORKERS = 4
MAX_TRAJECTORY_SAMPLES = 2000

SVG_SCALE = 400
SVG_MARGIN = 40
SVG_LABEL_DEPTH = 4
SVG_FONT_SIZE = 12
SVG_COLORS = {
    "background": "#ffffff",
    "rectangle": "#f4f6fb",
    "outline": "#1f2937",
    "top": "#2563eb",
    "side": "#dc2626",
    "tick": "#6b7280",
    "text": "#111827",
}

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DEPTH = 2
