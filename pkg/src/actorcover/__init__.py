"""actorcover: model-based conformance testing for actor systems.

The pipeline: enumerate an executable reference model's bounded
transition graph, cover every edge with a minimal set of root-anchored
paths, and deterministically replay those paths against the actor
implementation with exact per-step state-equivalence checks.
"""

__version__ = "0.1.0"
