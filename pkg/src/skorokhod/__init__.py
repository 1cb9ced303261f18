"""Skorokhod-space toolkit: cadlag functions, J/M oscillation gauges,
the four classical metrics, sequence embeddings and Markov-chain
tightness diagnostics."""

from .cadlag import (
    CadlagFunction,
    GraphPoint,
    PolygonalGraph,
    TimeChange,
    ParamRep,
    evaluate,
    left_limit,
    incomplete_graph,
    completed_graph,
    project,
    restrict,
)

__version__ = "0.1.0"

__all__ = [
    "CadlagFunction",
    "GraphPoint",
    "PolygonalGraph",
    "TimeChange",
    "ParamRep",
    "evaluate",
    "left_limit",
    "incomplete_graph",
    "completed_graph",
    "project",
    "restrict",
]
