"""Deterministic radio network simulator and labeling schemes."""

import json

from ._radiolab import (  # noqa: F401
    Graph,
    PreconditionViolation,
    PrimeBoundExceeded,
    ScenarioError,
    InvalidGraph,
    automorphisms,
    complete_graph,
    cycle_graph,
    distance_two_coloring,
    distinguishing_number,
    gossip_labels,
    kb_labels,
    path_graph,
    random_connected_graph,
    random_tree,
    run_gossip,
    run_kb,
    run_tn,
    star_graph,
    tn_graph,
    tn_labels,
)
from ._radiolab import run_scenario_json as _run_scenario_json


def run_scenario(scenario, base_dir=".", verify=False):
    """Run a scenario given as a dict or JSON string; returns a dict."""
    text = scenario if isinstance(scenario, str) else json.dumps(scenario)
    return json.loads(_run_scenario_json(text, base_dir, verify))
