from __future__ import annotations

from pathlib import Path

GLS_DIR = Path(__file__).parent / "gls"
GLS_MODEL = GLS_DIR / "model.csv"
GLS_TIMESERIES = GLS_DIR / "ts"


def load_gls():
    """The bundled GreenLab Skive hub dataset with its synthetic hourly series."""
    from hubopt.model import load_dataset

    return load_dataset(GLS_MODEL, GLS_TIMESERIES)
