"""Quantitative models: the management feedback loop, consumer/circuit
utility, community circuits, and power-law / long-tail analysis."""

from .loop import TimeSeries, LoopParams, LoopTrace, quality_gap, simulate_loop
from .utility import UtilityParams, consumer_utility, net_utility
from .community import (Stakeholder, Circuit, CommunityGraph, Topology,
                        circuit_count, derive_circuits, select_circuits,
                        aggregate_topology, expand_polymorphs, BASE_STATES)
from .powerlaw import (PowerLawFit, TailShares, fit_power_law, tail_share,
                       synthesize_counts)

__all__ = [
    "TimeSeries", "LoopParams", "LoopTrace", "quality_gap", "simulate_loop",
    "UtilityParams", "consumer_utility", "net_utility",
    "Stakeholder", "Circuit", "CommunityGraph", "Topology", "circuit_count",
    "derive_circuits", "select_circuits", "aggregate_topology",
    "expand_polymorphs", "BASE_STATES",
    "PowerLawFit", "TailShares", "fit_power_law", "tail_share",
    "synthesize_counts",
]
