"""
Dynamics Module

Configurations, set firing, ready sets and the Dhar burning fixed point,
stabilization, stability / criticality / recurrence, epsilon, canonical
recurrent representatives and the sandpile / cluster-firing duality.

All functions are pure: inputs are immutable and randomness only comes
from an explicit seed.
"""

import random
from collections import deque
from dataclasses import dataclass
from enum import Enum

from chipfiring.multigraph import SINK
from chipfiring.model import in_model, materialize


class NegativeConfigurationError(ValueError):
    """A stable/recurrent query was given a configuration with debt."""


class ConfigurationSizeError(ValueError):
    """Configuration length does not match the number of non-sink vertices."""


class ChipValueError(ValueError):
    """A chip count is not an integer."""


class InvariantViolation(RuntimeError):
    """An internal invariant failed; this signals a bug, not bad input."""


@dataclass(frozen=True)
class Configuration:
    """
    Chips on the non-sink vertices 1..n (chips[0] is vertex 1).
    The sink holds -sum(chips), so the configuration degree is always 0.
    """
    chips: tuple

    def __post_init__(self):
        chips = tuple(self.chips)
        bad = [c for c in chips if isinstance(c, bool) or not isinstance(c, int)]
        if bad:
            raise ChipValueError(f"Chip counts must be integers, got {bad[0]!r}")
        object.__setattr__(self, 'chips', chips)

    def __len__(self):
        return len(self.chips)

    @property
    def sink_value(self):
        return -sum(self.chips)

    def value(self, v):
        if v == SINK:
            return self.sink_value
        return self.chips[v - 1]

    def with_value(self, v, amount):
        chips = list(self.chips)
        chips[v - 1] = amount
        return Configuration(tuple(chips))

    def __add__(self, other):
        _same_length(self, other)
        return Configuration(tuple(a + b for a, b in zip(self.chips, other.chips)))

    def __sub__(self, other):
        _same_length(self, other)
        return Configuration(tuple(a - b for a, b in zip(self.chips, other.chips)))

    def scale(self, k):
        return Configuration(tuple(k * c for c in self.chips))

    def is_nonnegative(self):
        return all(c >= 0 for c in self.chips)


def _same_length(a, b):
    if len(a.chips) != len(b.chips):
        raise ConfigurationSizeError(f"Configurations have different lengths: {len(a.chips)} and {len(b.chips)}")


class StrategyKind(Enum):
    """Which ready set stabilize() fires next."""
    FIRST_READY_MAXIMAL = "first-ready-maximal"
    SINGLETONS_FIRST = "singletons-first"
    RANDOM = "random"


@dataclass(frozen=True)
class FiringStrategy:
    kind: StrategyKind = StrategyKind.FIRST_READY_MAXIMAL
    seed: int = 0

    @classmethod
    def random(cls, seed):
        return cls(StrategyKind.RANDOM, seed)

    def describe(self):
        if self.kind is StrategyKind.RANDOM:
            return f"random(seed={self.seed})"
        return self.kind.value


DEFAULT_STRATEGY = FiringStrategy()


def check_configuration(g, D):
    if len(D.chips) != g.n:
        raise ConfigurationSizeError(f"Configuration has {len(D.chips)} entries, graph has {g.n} non-sink vertices")


def zero_configuration(g):
    return Configuration((0,) * g.n)


def degree_configuration(g):
    return Configuration(tuple(g.degree(v) for v in g.non_sink))


def k_plus(g):
    """deg(v) - 1 at every non-sink vertex."""
    return Configuration(tuple(g.degree(v) - 1 for v in g.non_sink))


def add_chips(D, v, k=1):
    """Add k chips at non-sink v; the sink pays for them."""
    return D.with_value(v, D.value(v) + k)


def fire_set(g, D, vertex_set):
    """
    Return D - Q chi_S. Vertices in S lose their edges leaving S, vertices
    outside gain their edges into S. S may contain the sink (its own value
    is derived). Debt is allowed in the result.
    """
    check_configuration(g, D)
    S = frozenset(vertex_set)
    chips = list(D.chips)
    for v in g.non_sink:
        if v in S:
            chips[v - 1] -= g.edges_leaving(v, S)
        else:
            chips[v - 1] += g.edges_between(v, S)
    return Configuration(tuple(chips))


def fire_sink(g, D):
    return fire_set(g, D, {SINK})


def is_ready(g, h, D, vertex_set):
    M = frozenset(vertex_set)
    if not in_model(h, M):
        return False
    return all(D.value(v) >= g.edges_leaving(v, M) for v in M)


def max_ready_subset(g, D, vertex_set, exempt=None):
    """
    Dhar burning fixed point inside A: repeatedly drop any vertex (other than
    `exempt`) that firing the current set would send into debt.

    Without an exemption the result is the union of all ready subsets of A.
    Deletion order does not change the result.
    """
    S = set(vertex_set)
    out = {v: g.edges_leaving(v, S) for v in S}
    queue = deque(sorted(v for v in S if v != exempt and D.value(v) < out[v]))
    queued = set(queue)
    while queue:
        v = queue.popleft()
        S.discard(v)
        for eid in g.incident_edges(v):
            w = g.other_end(eid, v)
            if w in S:
                out[w] += 1
                if w != exempt and w not in queued and D.value(w) < out[w]:
                    queue.append(w)
                    queued.add(w)
    return frozenset(S)


def maximal_ready_sets(g, h, D, within=None, exempt=None):
    """
    Maximal ready sets inside `within` (default: every non-sink vertex):
    one burning fixed point per maximal set A_j, empties and strictly
    contained sets dropped, duplicates merged.
    """
    U = frozenset(g.non_sink if within is None else within)
    found = set()
    for block in h.maximal_sets:
        A = block & U
        if not A:
            continue
        F = max_ready_subset(g, D, A, exempt if exempt in A else None)
        if F:
            found.add(F)
    maximal = [F for F in found if not any(F < other for other in found)]
    return sorted(maximal, key=sorted)


def min_loss(g, h, D, v, within=None, exempt_pivot=True):
    """
    m(v, D): least number of chips v loses by firing a maximal ready set
    containing it. Returns None when v is in no such set.
    """
    candidates = [
        F for F in maximal_ready_sets(g, h, D, within, exempt=v if exempt_pivot else None)
        if v in F
    ]
    if not candidates:
        return None
    return min(g.edges_leaving(v, F) for F in candidates)


def active_vertices(g, h, D):
    """Vertices lying in some ready set."""
    active = set()
    for block in h.maximal_sets:
        active |= max_ready_subset(g, D, block)
    return frozenset(active)


def ready_sets_brute_force(g, h, D):
    """Every ready member of H, by exhaustive search (tiny instances only)."""
    return sorted((M for M in materialize(h) if is_ready(g, h, D, M)), key=lambda M: (len(M), sorted(M)))


def is_stable(g, h, D):
    check_configuration(g, D)
    if not D.is_nonnegative():
        raise NegativeConfigurationError(f"Stability is only defined without debt, got chips {list(D.chips)}")
    return all(not max_ready_subset(g, D, block) for block in h.maximal_sets)


def _next_firing(g, h, D, strategy, rng):
    if strategy.kind is StrategyKind.SINGLETONS_FIRST:
        for v in g.non_sink:
            if D.value(v) >= g.degree(v):
                return frozenset([v])
    if strategy.kind is StrategyKind.RANDOM:
        candidates = []
        for block in h.maximal_sets:
            F = max_ready_subset(g, D, block)
            if F and F not in candidates:
                candidates.append(F)
        for v in g.non_sink:
            single = frozenset([v])
            if D.value(v) >= g.degree(v) and single not in candidates:
                candidates.append(single)
        return rng.choice(candidates) if candidates else None
    for block in h.maximal_sets:
        F = max_ready_subset(g, D, block)
        if F:
            return F
    return None


def stabilize_traced(g, h, D, strategy=None):
    """
    Fire ready sets until none is left.

    Returns:
        tuple: (stable Configuration, per-vertex firing counts, list of fired sets)
    """
    check_configuration(g, D)
    strategy = strategy or DEFAULT_STRATEGY
    rng = random.Random(strategy.seed)
    counts = [0] * g.n
    sequence = []
    current = D
    while True:
        S = _next_firing(g, h, current, strategy, rng)
        if S is None:
            return current, tuple(counts), sequence
        current = fire_set(g, current, S)
        for v in S:
            counts[v - 1] += 1
        sequence.append(S)


def stabilize(g, h, D, strategy=None):
    """Stable configuration and per-vertex firing counts (independent of strategy)."""
    stable, counts, _ = stabilize_traced(g, h, D, strategy)
    return stable, counts


def is_critical(g, h, D):
    """Stable, and firing the sink then stabilizing gives D back."""
    check_configuration(g, D)
    if not D.is_nonnegative() or not is_stable(g, h, D):
        return False
    stable, _ = stabilize(g, h, fire_sink(g, D))
    return stable == D


def is_recurrent(g, h, D):
    # recurrent <=> critical
    return is_critical(g, h, D)


def lemma4_check(g, h, D):
    """
    From D with the sink fired, repeatedly fire the lowest active vertex on
    its own (debt allowed). True iff this ends back at D with every non-sink
    vertex fired exactly once. Non-stable input gives False.
    """
    check_configuration(g, D)
    if not D.is_nonnegative() or not is_stable(g, h, D):
        return False
    current = fire_sink(g, D)
    fired = [0] * g.n
    total = 0
    while True:
        active = active_vertices(g, h, current)
        if not active:
            break
        if total >= g.n:
            return False
        v = min(active)
        current = fire_set(g, current, {v})
        fired[v - 1] += 1
        total += 1
    return current == D and all(count == 1 for count in fired)


def epsilon(g, h):
    """
    eps = D - stabilize(D) with D(v) = deg(v); strictly positive everywhere.
    Adding eps to a recurrent configuration and stabilizing gives it back.
    """
    D = degree_configuration(g)
    stable, _ = stabilize(g, h, D)
    eps = D - stable
    if any(c <= 0 for c in eps.chips):
        raise InvariantViolation(f"epsilon is not strictly positive: {list(eps.chips)}")
    return eps


def _default_iteration_cap(g, factor):
    # Iterates are pairwise distinct stable configurations, so the degree box bounds them.
    from chipfiring.oracle import count_spanning_trees, degree_box_volume
    return max(factor * count_spanning_trees(g), degree_box_volume(g))


def recurrent_representative(g, h, D, max_iterations=None):
    """
    The unique recurrent configuration equivalent to D: stabilize, then
    fire the sink and restabilize until the result is critical.

    Raises:
        NegativeConfigurationError: D has debt off the sink
        InvariantViolation: the iteration cap was exceeded
    """
    from chipfiring.settings import CANON_ITERATION_FACTOR

    check_configuration(g, D)
    if not D.is_nonnegative():
        raise NegativeConfigurationError(f"recurrent_representative needs nonnegative chips, got {list(D.chips)}")
    cap = max_iterations if max_iterations is not None else _default_iteration_cap(g, CANON_ITERATION_FACTOR)
    current, _ = stabilize(g, h, D)
    iterations = 0
    while not is_critical(g, h, current):
        if iterations >= cap:
            raise InvariantViolation(f"No recurrent configuration after {cap} sink firings from {list(D.chips)}")
        current, _ = stabilize(g, h, fire_sink(g, current))
        iterations += 1
    return current


def dualize(g, D):
    """K+ - D; swaps sandpile and cluster-firing recurrent configurations."""
    check_configuration(g, D)
    return k_plus(g) - D
