"""
Build Corpus Module

Verification corpora: every connected simple graph from the networkx graph
atlas up to a vertex bound (vertex 0 is the sink), each also with one
seeded doubled edge, plus the named graphs B3, P3, K4 and C5; crossed with
model covers and seeded edge orderings.
"""

import math
import random
from dataclasses import dataclass

import networkx as nx

from chipfiring.model import all_antichain_covers, asm_cover, cfm_cover, sample_antichain_covers
from chipfiring.multigraph import build_graph, relabel_edges

MODEL_LABELS = ('asm', 'cfm', 'all-antichains')

# per-graph sample size once all_antichain_covers is out of reach
SAMPLED_COVERS = 8


@dataclass(frozen=True)
class CorpusInstance:
    graph_name: str
    graph: object
    model_label: str
    cover: object
    ordering: tuple

    @property
    def key(self):
        return (self.graph_name, self.model_label, self.ordering)


def named_graphs():
    return {
        'B3': build_graph(2, [(0, 1), (0, 1), (0, 1)]),
        'P3': build_graph(3, [(0, 1), (1, 2)]),
        'K4': build_graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        'C5': build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]),
    }


def atlas_graphs(max_vertices, seed=0):
    """
    Connected atlas graphs on 2..max_vertices vertices, named `atlas<i>`,
    each followed by `atlas<i>+d` with one seeded edge doubled.
    """
    if max_vertices > 7:
        raise ValueError(f"The graph atlas stops at 7 vertices, got --max-vertices {max_vertices}")
    rng = random.Random(seed)
    graphs = {}
    for index, G in enumerate(nx.graph_atlas_g()):
        if not 2 <= G.number_of_nodes() <= max_vertices or not nx.is_connected(G):
            continue
        edges = sorted(tuple(sorted(e)) for e in G.edges())
        g = build_graph(G.number_of_nodes(), edges)
        graphs[f"atlas{index}"] = g
        graphs[f"atlas{index}+d"] = build_graph(g.vertex_count, edges + [rng.choice(edges)])
    return graphs


def covers_for(g, model_labels, seed=0):
    """(label, cover) pairs; `all-antichains` expands to one label per cover."""
    covers = []
    for label in model_labels:
        if label == 'asm':
            covers.append(('asm', asm_cover(g)))
        elif label == 'cfm':
            covers.append(('cfm', cfm_cover(g)))
        elif label == 'all-antichains':
            if g.n <= 4:
                found = all_antichain_covers(g)
            else:
                found = sample_antichain_covers(g, SAMPLED_COVERS, seed)
            for cover in found:
                sets = "|".join(",".join(str(v) for v in sorted(block)) for block in cover.maximal_sets)
                covers.append((f"sets:{sets}", cover))
        else:
            raise ValueError(f"Unknown model {label!r}; choose from {', '.join(MODEL_LABELS)}")
    return covers


def edge_orderings(g, count, seed=0):
    """
    The native order followed by up to `count` distinct seeded permutations
    (1-based edge ids). Graphs with few edges get fewer: every permutation
    appears at most once.
    """
    native = tuple(g.edge_ids)
    orderings = [native]
    seen = {native}
    target = min(count, math.factorial(len(native)) - 1)
    rng = random.Random(seed)
    while len(orderings) <= target:
        permutation = list(native)
        rng.shuffle(permutation)
        permutation = tuple(permutation)
        if permutation not in seen:
            seen.add(permutation)
            orderings.append(permutation)
    return orderings


def build_corpus(graphs, model_labels=('asm',), orderings=0, seed=0):
    """
    Args:
        graphs (dict): name -> Multigraph
        model_labels (iterable): subset of MODEL_LABELS
        orderings (int): seeded edge permutations per (graph, model) on top of the native order

    Returns:
        list: CorpusInstance objects sorted by key
    """
    instances = []
    for name, g in graphs.items():
        for label, cover in covers_for(g, model_labels, seed):
            for permutation in edge_orderings(g, orderings, seed):
                instances.append(CorpusInstance(name, relabel_edges(g, permutation), label, cover, permutation))
    instances.sort(key=lambda inst: inst.key)
    return instances


def default_graphs(max_vertices, seed=0):
    graphs = atlas_graphs(max_vertices, seed)
    graphs.update(named_graphs())
    return graphs
