"""
Model Module

A hereditary chip-firing model H stored as its maximal sets A_1..A_k.
H itself (every nonempty subset of some A_j) is never materialized.

Hereditary + covering is the same thing as closed under subtraction +
containing every singleton; only the maximal-set representation is kept.
"""

import random
from dataclasses import dataclass
from itertools import combinations

from chipfiring.multigraph import SINK


class ModelError(ValueError):
    """Base class for invalid covers."""


class CoverError(ModelError):
    """Some non-sink vertex lies in no maximal set."""


class AntichainError(ModelError):
    """Two maximal sets are comparable."""


class SinkInSetError(ModelError):
    """A maximal set contains the sink or a vertex outside the graph."""


class EmptySetError(ModelError):
    """A maximal set is empty."""


@dataclass(frozen=True)
class Cover:
    """
    Attributes:
        maximal_sets (tuple): frozensets A_1..A_k, in the order given
    """
    maximal_sets: tuple

    @property
    def vertices_covered(self):
        covered = set()
        for block in self.maximal_sets:
            covered |= block
        return frozenset(covered)

    def describe(self):
        """Model-file body: one `set ...` line per maximal set."""
        return "\n".join("set " + " ".join(str(v) for v in sorted(block)) for block in self.maximal_sets)


def build_model(g, maximal_sets):
    """
    Validate a list of maximal sets against graph g.

    Raises:
        EmptySetError, SinkInSetError, CoverError, AntichainError
    """
    blocks = []
    for index, block in enumerate(maximal_sets, start=1):
        block = frozenset(block)
        if not block:
            raise EmptySetError(f"Maximal set A_{index} is empty")
        if SINK in block:
            raise SinkInSetError(f"Maximal set A_{index} = {sorted(block)} contains the sink")
        outside = [v for v in block if not 1 <= v <= g.n]
        if outside:
            raise SinkInSetError(f"Maximal set A_{index} = {sorted(block)} references vertex {outside[0]} outside 1..{g.n}")
        blocks.append(block)

    cover = Cover(tuple(blocks))
    covered = cover.vertices_covered
    uncovered = [v for v in g.non_sink if v not in covered]
    if uncovered:
        raise CoverError(f"Vertex {uncovered[0]} is not covered by any maximal set")

    for (i, a), (j, b) in combinations(enumerate(blocks, start=1), 2):
        if a <= b or b <= a:
            small, big = (i, j) if a <= b else (j, i)
            raise AntichainError(
                f"Maximal sets are comparable: A_{small} = {sorted(blocks[small - 1])} "
                f"is contained in A_{big} = {sorted(blocks[big - 1])}"
            )

    return cover


def asm_cover(g):
    """Abelian sandpile model: singletons only."""
    return Cover(tuple(frozenset([v]) for v in g.non_sink))


def cfm_cover(g):
    """Cluster firing model: every non-sink subset."""
    return Cover((frozenset(g.non_sink),))


def in_model(h, vertex_set):
    S = frozenset(vertex_set)
    return bool(S) and any(S <= block for block in h.maximal_sets)


def model_name(g, h):
    """'asm', 'cfm' or 'custom' (two-vertex graphs report 'asm')."""
    if set(h.maximal_sets) == set(asm_cover(g).maximal_sets):
        return 'asm'
    if h.maximal_sets == cfm_cover(g).maximal_sets:
        return 'cfm'
    return 'custom'


def _nonempty_subsets(vertices):
    vertices = sorted(vertices)
    for size in range(len(vertices), 0, -1):
        for combo in combinations(vertices, size):
            yield frozenset(combo)


def all_antichain_covers(g, max_non_sink=4):
    """
    Every covering antichain of nonempty non-sink sets, canonical order.

    Only for small graphs: the count grows like the Dedekind numbers.
    """
    if g.n > max_non_sink:
        raise ValueError(f"all_antichain_covers supports at most {max_non_sink} non-sink vertices, graph has {g.n}")
    candidates = list(_nonempty_subsets(g.non_sink))
    everything = frozenset(g.non_sink)
    found = []

    def extend(start, chosen, covered):
        if covered == everything:
            found.append(tuple(chosen))
        for index in range(start, len(candidates)):
            block = candidates[index]
            if any(block <= other or other <= block for other in chosen):
                continue
            chosen.append(block)
            extend(index + 1, chosen, covered | block)
            chosen.pop()

    extend(0, [], frozenset())
    covers = [Cover(blocks) for blocks in found]
    covers.sort(key=lambda c: [sorted(block) for block in c.maximal_sets])
    return covers


def random_antichain_cover(g, rng):
    """Random covering antichain: grow random blocks, then drop comparable ones."""
    blocks = []
    remaining = list(g.non_sink)
    rng.shuffle(remaining)
    for v in remaining:
        if any(v in block for block in blocks):
            continue
        size = rng.randint(1, g.n)
        others = [w for w in g.non_sink if w != v]
        block = frozenset([v, *rng.sample(others, min(size - 1, len(others)))])
        blocks = [b for b in blocks if not b <= block]
        if not any(block <= b for b in blocks):
            blocks.append(block)
    return build_model(g, blocks)


def sample_antichain_covers(g, count, seed):
    rng = random.Random(seed)
    seen = {}
    for _ in range(count * 4):
        cover = random_antichain_cover(g, rng)
        seen.setdefault(frozenset(cover.maximal_sets), cover)
        if len(seen) >= count:
            break
    return list(seen.values())


def is_closed_under_subtraction(family):
    """True if A - B stays in the family (or is empty) for all A, B."""
    family = set(family)
    return all(not (a - b) or (a - b) in family for a in family for b in family)


def materialize(h):
    """Every member of H; exponential, for tests on tiny covers."""
    members = set()
    for block in h.maximal_sets:
        members.update(_nonempty_subsets(block))
    return members
