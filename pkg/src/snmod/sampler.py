"""Snowball sampling of node-induced subgraphs.

Each expansion picks a uniformly random not-yet-included node (seeded
Mersenne Twister, so runs replicate across platforms), then adds it and its
neighbors in ascending internal id until the target size is reached exactly.
"""

import random
from dataclasses import dataclass

from .geograph import GeoGraph, induced_subgraph


@dataclass(frozen=True)
class SampleSpec:
    target_size: int
    seed: int = 0

    def __post_init__(self):
        if self.target_size < 1:
            raise ValueError("target_size must be >= 1")


def snowball_sample(g: GeoGraph, spec: SampleSpec) -> GeoGraph:
    """Grow a node-induced subgraph of exactly min(target_size, |V|) nodes."""
    n = g.num_nodes
    if n == 0:
        raise ValueError("cannot sample an empty graph")
    if spec.target_size >= n:
        return induced_subgraph(g, range(n))
    rng = random.Random(spec.seed)
    included = [False] * n
    count = 0
    candidates = list(range(n))
    while count < spec.target_size:
        seed_node = candidates[rng.randrange(len(candidates))]
        batch = [seed_node]
        batch.extend(sorted(j for j, _ in g.adj[seed_node] if j != seed_node))
        for v in batch:
            if not included[v]:
                included[v] = True
                count += 1
                if count == spec.target_size:
                    break
        candidates = [v for v in candidates if not included[v]]
    return induced_subgraph(g, (i for i in range(n) if included[i]))
