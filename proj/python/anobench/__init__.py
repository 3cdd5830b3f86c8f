"""Telemetry anomaly-detection benchmark pipeline (C++ core bindings)."""

from anobench._core import *  # noqa: F401,F403
from anobench._core import __version__  # noqa: F401
