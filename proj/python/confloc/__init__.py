"""Localize configuration errors from logs.

Thin wrapper over the compiled ``_confloc`` module. Reports come back as
parsed JSON dictionaries.
"""

import json as _json

from ._confloc import (
    ConflocError,
    __version__,
    accuracy,
    anomaly_degree,
    bench_gen,
    fp_rate,
    ingest,
    mutate_value,
    parse_log,
    store_size,
    template_hash,
)
from ._confloc import analyze as _analyze
from ._confloc import bench_eval as _bench_eval

EXIT_FAULT_FREE = 0
EXIT_SUSPECTS_FOUND = 10
EXIT_INCONCLUSIVE = 11


def analyze(logs, configs, store, **kwargs):
    """Run the pipeline. Returns ``(exit_code, report_dict)``."""
    code, text = _analyze([str(p) for p in logs], [str(p) for p in configs], str(store), **kwargs)
    return code, _json.loads(text)


def bench_eval(cases, llm="mock"):
    """Evaluate generated cases. Returns the metrics dictionary."""
    return _json.loads(_bench_eval(str(cases), llm))


__all__ = [
    "ConflocError",
    "EXIT_FAULT_FREE",
    "EXIT_INCONCLUSIVE",
    "EXIT_SUSPECTS_FOUND",
    "accuracy",
    "analyze",
    "anomaly_degree",
    "bench_eval",
    "bench_gen",
    "fp_rate",
    "ingest",
    "mutate_value",
    "parse_log",
    "store_size",
    "template_hash",
]
