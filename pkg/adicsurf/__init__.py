"""Weighted ordered Bratteli diagrams, their adic surfaces, renormalization and ergodicity."""

__version__ = "1.0.0"


def main(argv=None) -> int:
    # imported lazily so deps_check can run before numpy/scipy/drawsvg are touched
    from .cli import main as _main

    return _main(argv)


__all__ = ["main", "__version__"]
