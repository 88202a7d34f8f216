import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chipfiring.dynamics import (
    Configuration,
    ChipValueError,
    ConfigurationSizeError,
    FiringStrategy,
    InvariantViolation,
    NegativeConfigurationError,
    StrategyKind,
    add_chips,
    dualize,
    epsilon,
    fire_set,
    fire_sink,
    is_critical,
    is_ready,
    is_recurrent,
    is_stable,
    k_plus,
    lemma4_check,
    max_ready_subset,
    maximal_ready_sets,
    min_loss,
    ready_sets_brute_force,
    recurrent_representative,
    stabilize,
    stabilize_traced,
    zero_configuration,
)
from chipfiring.model import asm_cover, cfm_cover
from chipfiring.multigraph import SINK, build_graph
from chipfiring.oracle import degree_box, enumerate_recurrent, equivalent
from graph_strategies import configurations, graph_and_cover, multigraphs


def C(*chips):
    return Configuration(chips)


def test_configuration_arithmetic():
    D = C(2, 1)
    assert D.sink_value == -3
    assert D + C(1, 1) == C(3, 2)
    assert D - C(1, 1) == C(1, 0)
    assert D.scale(2) == C(4, 2)
    assert add_chips(D, 2, 3) == C(2, 4)
    with pytest.raises(ConfigurationSizeError):
        D + C(1)


@pytest.mark.parametrize("graph, D, S, expected", [
    ("k3", (2, 0), {1}, (0, 1)),
    ("k3", (2, 1), {1, 2}, (1, 0)),
    ("b3", (3,), {1}, (0,)),
])
def test_fire_set(request, graph, D, S, expected):
    g = request.getfixturevalue(graph)
    assert fire_set(g, Configuration(D), S) == Configuration(expected)


def test_fire_sink(k3, b3):
    assert fire_sink(k3, C(1, 1)) == C(2, 2)
    assert fire_sink(k3, C(0, 0)) == C(1, 1)
    assert fire_sink(b3, C(0)) == C(3)


def test_fire_set_checks_length(k3):
    with pytest.raises(ConfigurationSizeError):
        fire_set(k3, C(1), {1})


def test_is_ready(asm_k3, cfm_k3):
    g, cfm = cfm_k3
    _, asm = asm_k3
    assert is_ready(g, cfm, C(1, 1), {1, 2})
    assert not is_ready(g, cfm, C(1, 0), {1, 2})
    assert not is_ready(g, asm, C(1, 1), {1, 2})


def test_max_ready_subset(k3):
    assert max_ready_subset(k3, C(1, 1), {1, 2}) == {1, 2}
    assert max_ready_subset(k3, C(1, 0), {1, 2}) == frozenset()
    assert max_ready_subset(k3, C(1, 0), {1, 2}, exempt=1) == {1}


def test_maximal_ready_sets(asm_k3, cfm_k3):
    g, asm = asm_k3
    _, cfm = cfm_k3
    assert maximal_ready_sets(g, asm, C(2, 1)) == [frozenset({1})]
    assert maximal_ready_sets(g, cfm, C(2, 1)) == [frozenset({1, 2})]
    assert maximal_ready_sets(g, cfm, C(0, 0)) == []


def test_min_loss(asm_k3, cfm_k3):
    g, asm = asm_k3
    _, cfm = cfm_k3
    assert min_loss(g, cfm, C(1, 1), 1, within={1, 2}) == 1
    assert min_loss(g, asm, C(2, 1), 1, within={1, 2}) == 2
    # without the exemption v2 with no chips is in no ready set
    assert min_loss(g, asm, C(2, 0), 2, exempt_pivot=False) is None
    assert min_loss(g, asm, C(2, 0), 2) == 2


@pytest.mark.parametrize("model, D, expected", [
    ("asm", (1, 1), True),
    ("cfm", (1, 1), False),
    ("cfm", (1, 0), True),
])
def test_is_stable(k3, model, D, expected):
    h = asm_cover(k3) if model == "asm" else cfm_cover(k3)
    assert is_stable(k3, h, Configuration(D)) is expected


def test_is_stable_rejects_debt(asm_k3):
    g, h = asm_k3
    with pytest.raises(NegativeConfigurationError):
        is_stable(g, h, C(-1, 0))


def test_stabilize_examples(asm_k3, cfm_k3):
    g, asm = asm_k3
    _, cfm = cfm_k3
    assert stabilize(g, asm, C(2, 2)) == (C(1, 1), (1, 1))
    assert stabilize(g, cfm, C(1, 1)) == (C(0, 0), (1, 1))
    assert stabilize(g, asm, C(1, 0)) == (C(1, 0), (0, 0))
    _, _, sequence = stabilize_traced(g, cfm, C(1, 1))
    assert sequence == [frozenset({1, 2})]


@pytest.mark.parametrize("model, D, expected", [
    ("asm", (1, 1), True),
    ("cfm", (1, 0), True),
    ("asm", (0, 0), False),
    ("cfm", (1, 1), False),
])
def test_is_critical_and_lemma4(k3, model, D, expected):
    h = asm_cover(k3) if model == "asm" else cfm_cover(k3)
    assert is_critical(k3, h, Configuration(D)) is expected
    assert is_recurrent(k3, h, Configuration(D)) is expected
    assert lemma4_check(k3, h, Configuration(D)) is expected


def test_lemma4_cfm_zero(cfm_k3):
    g, h = cfm_k3
    assert lemma4_check(g, h, C(0, 0))


def test_negative_input_is_not_critical(asm_k3):
    g, h = asm_k3
    assert not is_critical(g, h, C(-1, 2))


def test_epsilon(asm_k3, b3, p3):
    g, h = asm_k3
    assert epsilon(g, h) == C(1, 1)
    assert epsilon(b3, asm_cover(b3)) == C(3)
    assert epsilon(p3, asm_cover(p3)) == C(1, 1)


def test_recurrent_representative(asm_k3, cfm_k3):
    g, asm = asm_k3
    _, cfm = cfm_k3
    assert recurrent_representative(g, asm, C(0, 0)) == C(1, 1)
    assert recurrent_representative(g, cfm, C(1, 1)) == C(0, 0)
    assert recurrent_representative(g, asm, C(1, 0)) == C(1, 0)
    with pytest.raises(NegativeConfigurationError):
        recurrent_representative(g, asm, C(-1, 0))


def test_recurrent_representative_on_long_path():
    path = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    h = asm_cover(path)
    nu = recurrent_representative(path, h, Configuration((0, 0, 0, 0)))
    assert is_recurrent(path, h, nu)
    assert equivalent(path, nu, Configuration((0, 0, 0, 0)))[0]
    with pytest.raises(InvariantViolation):
        recurrent_representative(path, h, Configuration((0, 0, 0, 0)), max_iterations=2)


def test_dualize(k3):
    assert dualize(k3, C(1, 1)) == C(0, 0)
    assert dualize(k3, C(0, 1)) == C(1, 0)
    assert k_plus(k3) == C(1, 1)


def test_strategy_describe():
    assert FiringStrategy().describe() == "first-ready-maximal"
    assert FiringStrategy.random(3).describe() == "random(seed=3)"
    assert FiringStrategy(StrategyKind.SINGLETONS_FIRST).kind is StrategyKind.SINGLETONS_FIRST


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_burning_fixed_point_is_union_of_ready_subsets(data):
    g, h = data.draw(graph_and_cover())
    D = data.draw(configurations(g, low=-1))
    block = data.draw(st.sampled_from(h.maximal_sets))
    union = set()
    for size in range(1, len(block) + 1):
        for subset in combinations(sorted(block), size):
            if all(D.value(v) >= g.edges_leaving(v, subset) for v in subset):
                union |= set(subset)
    assert max_ready_subset(g, D, block) == union


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_ready_sets_agree_with_brute_force(data):
    g, h = data.draw(graph_and_cover(max_vertices=4))
    D = data.draw(configurations(g))
    brute = ready_sets_brute_force(g, h, D)
    maximal = maximal_ready_sets(g, h, D)
    assert all(F in brute for F in maximal)
    assert all(any(M <= F for F in maximal) for M in brute)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_stabilization_is_confluent(data):
    g, h = data.draw(graph_and_cover())
    D = data.draw(configurations(g, slack=4))
    reference = stabilize(g, h, D)
    for seed in range(5):
        assert stabilize(g, h, D, FiringStrategy.random(seed)) == reference
    assert stabilize(g, h, D, FiringStrategy(StrategyKind.SINGLETONS_FIRST)) == reference
    assert is_stable(g, h, reference[0])


@settings(max_examples=40, deadline=None)
@given(graph_and_cover(max_vertices=4))
def test_critical_matches_lemma4_on_degree_box(instance):
    g, h = instance
    for D in degree_box(g):
        assert is_critical(g, h, D) == lemma4_check(g, h, D)


@settings(max_examples=40, deadline=None)
@given(graph_and_cover(max_vertices=4))
def test_epsilon_fixes_recurrent_configurations(instance):
    g, h = instance
    eps = epsilon(g, h)
    for nu in enumerate_recurrent(g, h):
        for k in (1, 2, 3):
            assert stabilize(g, h, nu + eps.scale(k))[0] == nu


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_recurrent_representative_is_recurrent_and_equivalent(data):
    g, h = data.draw(graph_and_cover(max_vertices=4))
    D = data.draw(configurations(g, slack=3))
    nu = recurrent_representative(g, h, D)
    assert is_recurrent(g, h, nu)
    same, witness = equivalent(g, D, nu)
    assert same and witness.verify(g, D, nu)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_duality_between_sandpile_and_cluster_firing(data):
    g = data.draw(graph_and_cover(max_vertices=4))[0]
    asm, cfm = asm_cover(g), cfm_cover(g)
    for nu in degree_box(g):
        assert is_recurrent(g, asm, nu) == is_recurrent(g, cfm, dualize(g, nu))


def test_add_chips_walk_reaches_recurrent(c5):
    h = asm_cover(c5)
    rng = random.Random(3)
    D = zero_configuration(c5)
    for _ in range(20):
        D = add_chips(D, rng.choice(list(c5.non_sink)))
    nu = recurrent_representative(c5, h, D)
    assert nu in enumerate_recurrent(c5, h)


def test_configuration_rejects_non_integer_chips():
    with pytest.raises(ChipValueError):
        Configuration((1.7,))
    with pytest.raises(ChipValueError):
        Configuration((1, True))
    with pytest.raises(ValueError):
        Configuration(("2",))


def test_k_plus_dualizes_to_zero(k3, c5):
    for g in (k3, c5):
        assert dualize(g, k_plus(g)) == zero_configuration(g)
        assert zero_configuration(g).sink_value == 0


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_firing_conserves_chips_with_the_sink(data):
    g, _ = data.draw(graph_and_cover())
    D = data.draw(configurations(g, low=-1))
    S = frozenset(data.draw(st.sets(st.sampled_from(list(g.non_sink)), min_size=1)))
    fired = fire_set(g, D, S)
    assert sum(fired.value(v) for v in g.vertices) == 0
    assert fired.sink_value - D.sink_value == g.edges_between(SINK, S)
    after_sink = fire_sink(g, D)
    assert sum(after_sink.value(v) for v in g.vertices) == 0
    assert D.sink_value - after_sink.sink_value == g.degree(SINK)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_sandpile_min_loss_is_the_degree(data):
    g = data.draw(multigraphs())
    h = asm_cover(g)
    D = data.draw(configurations(g, low=-1))
    v = data.draw(st.sampled_from(list(g.non_sink)))
    within = {v} | data.draw(st.sets(st.sampled_from(list(g.non_sink))))
    assert min_loss(g, h, D, v) == g.degree(v)
    assert min_loss(g, h, D, v, within) == g.degree(v)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_nothing_outside_the_degree_box_is_stable(data):
    g, h = data.draw(graph_and_cover())
    D = data.draw(configurations(g, slack=0))
    v = data.draw(st.sampled_from(list(g.non_sink)))
    over = D.with_value(v, g.degree(v) + data.draw(st.integers(0, 3)))
    assert not is_stable(g, h, over)


def _burn_in_order(g, D, block, exempt, rng):
    S = set(block)
    while True:
        doomed = [v for v in sorted(S) if v != exempt and D.value(v) < g.edges_leaving(v, S)]
        if not doomed:
            return frozenset(S)
        S.discard(rng.choice(doomed))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_burning_does_not_depend_on_deletion_order(data):
    g, h = data.draw(graph_and_cover())
    D = data.draw(configurations(g, low=-1))
    block = data.draw(st.sampled_from(h.maximal_sets))
    exempt = data.draw(st.sampled_from([None] + sorted(block)))
    expected = max_ready_subset(g, D, block, exempt)
    for seed in range(5):
        assert _burn_in_order(g, D, block, exempt, random.Random(seed)) == expected
