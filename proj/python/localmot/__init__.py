"""Local multi-object tracking metrics."""

import json as _json

from ._core import (
    Box,
    ContractError,
    FormatError,
    ParseError,
    Sequence,
    __version__,
    association_fraction,
    decompose,
    fixture_catalog,
    iou,
    kendall_tau_b,
    local_metrics,
    make_sequence,
    mean_over_horizons,
    parse_mot,
    strict_metrics,
    write_catalog,
)
from . import _core

DEFAULT_HORIZONS = "0,0.2s,0.5s,1s,2s,5s,strict"


def evaluate(trackers, horizons=DEFAULT_HORIZONS, iou_threshold=0.5, decompose=False, jobs=1):
    """Report dict for {tracker: [Sequence, ...]}."""
    return _json.loads(_core.evaluate_json(trackers, horizons, iou_threshold, decompose, jobs))


def evaluate_files(gt, preds, horizons=DEFAULT_HORIZONS, iou_threshold=0.5, fps=None,
                   decompose=False, jobs=1):
    """Report dict for MOT files: gt path and {tracker: path}."""
    return _json.loads(
        _core.evaluate_files_json(gt, preds, horizons, iou_threshold, fps, decompose, jobs))


def compare(report, sort_key="mean_alta"):
    """Ranking table and Kendall matrix from a report dict."""
    scores = _core.tracker_scores_from_report(_json.dumps(report))
    return _json.loads(_core.compare_json(scores, sort_key))


__all__ = [
    "Box", "ContractError", "FormatError", "ParseError", "Sequence", "__version__",
    "association_fraction", "compare", "decompose", "evaluate", "evaluate_files",
    "fixture_catalog", "iou", "kendall_tau_b", "local_metrics", "make_sequence",
    "mean_over_horizons", "parse_mot", "strict_metrics", "write_catalog",
]
