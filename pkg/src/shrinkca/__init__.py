"""Shrinking-generator keystreams, their 90/150 cellular-automaton models,
and a deterministic two-phase key-recovery attack."""

__version__ = "0.1.0"
