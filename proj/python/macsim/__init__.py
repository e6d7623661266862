"""Sub-6GHz assisted mmWave V2V MAC simulator bindings."""

try:
    # Wheel layout: the extension lives inside the package.
    from ._macsim import (  # type: ignore[attr-defined]  # noqa: F401
        Reservation,
        earliest_start,
        golden,
        golden_fig2_expected,
        mean_los_neighbors,
        preset_names,
        run,
        run_ledger,
    )
except ImportError:
    # Build-tree layout: the extension sits on PYTHONPATH next to the package.
    from _macsim import (  # noqa: F401
        Reservation,
        earliest_start,
        golden,
        golden_fig2_expected,
        mean_los_neighbors,
        preset_names,
        run,
        run_ledger,
    )

__all__ = [
    "Reservation",
    "earliest_start",
    "golden",
    "golden_fig2_expected",
    "mean_los_neighbors",
    "preset_names",
    "run",
    "run_ledger",
]
