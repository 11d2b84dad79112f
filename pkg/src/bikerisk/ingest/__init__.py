"""Input parsing and structuring: accidents, GPS traces, street network."""

from .accidents import (
    AccidentLoadResult,
    AccidentRecord,
    AccidentSchema,
    Cause,
    Severity,
    batch_extract,
    load_accidents,
    make_file_fetcher,
)
from .network import NetworkBuildResult, build_street_graph
from .subdivide import subdivide_region
from .traces import Mode, TraceLoadResult, TraceSample, load_traces

__all__ = [
    "AccidentLoadResult",
    "AccidentRecord",
    "AccidentSchema",
    "Cause",
    "Severity",
    "batch_extract",
    "load_accidents",
    "make_file_fetcher",
    "NetworkBuildResult",
    "build_street_graph",
    "subdivide_region",
    "Mode",
    "TraceLoadResult",
    "TraceSample",
    "load_traces",
]
