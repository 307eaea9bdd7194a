"""Glauber dynamics on colorings and independent sets: samplers, one-step
couplings, exact small-instance oracles, fixed-point analysis and a
simulated-annealing sampler for the hard-core model."""

from .graph import Graph, build_graph

__all__ = ["Graph", "build_graph"]
__version__ = "0.1.0"
