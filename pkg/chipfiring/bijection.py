"""
Bijection Module

The edge-scanning algorithms sigma (recurrent configuration -> spanning tree)
and gamma (spanning tree -> vertex order -> recurrent configuration), with
full decision traces, an explicit policy for the branch the burning rule
leaves open (chips strictly above the threshold), and verify_bijection, which
certifies or refutes the bijection on one (graph, model, edge order) instance.
"""

from dataclasses import dataclass, field
from enum import Enum

from chipfiring.dynamics import (
    Configuration,
    check_configuration,
    fire_set,
    is_recurrent,
    min_loss,
)
from chipfiring.multigraph import SINK, boundary_edges


class NotRecurrentError(ValueError):
    """sigma was given a configuration that is not recurrent."""


class NotSpanningTreeError(ValueError):
    """The edge set is not a spanning tree of the graph."""


class ScanConsistencyError(RuntimeError):
    """gamma's replayed edge scan disagrees with its own vertex ordering pass."""


class AnomalyError(RuntimeError):
    """sigma or gamma could not finish; `trace` holds every decision made."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


class AnomalyAction(Enum):
    """What sigma does when D(v) is above the threshold (or m is undefined)."""
    HALT = "halt"
    REJECT = "reject"
    ACCEPT = "accept"


class RejectionMemory(Enum):
    """
    PERSISTENT keeps rejected edges for the whole run (burnt edges stay burnt);
    RESET empties R every time a vertex joins X.
    """
    PERSISTENT = "persistent"
    RESET = "reset"


@dataclass(frozen=True)
class AnomalyPolicy:
    on_anomaly: AnomalyAction = AnomalyAction.HALT
    pivot_exemption: bool = True
    rejection_memory: RejectionMemory = RejectionMemory.PERSISTENT

    def describe(self):
        exemption = "exempt" if self.pivot_exemption else "no-exempt"
        return f"{self.on_anomaly.value}/{exemption}/{self.rejection_memory.value}"

    def to_dict(self):
        return {
            "on_anomaly": self.on_anomaly.value,
            "pivot_exemption": self.pivot_exemption,
            "rejection_memory": self.rejection_memory.value,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            AnomalyAction(data.get("on_anomaly", "halt")),
            bool(data.get("pivot_exemption", True)),
            RejectionMemory(data.get("rejection_memory", "persistent")),
        )


DEFAULT_POLICY = AnomalyPolicy()


@dataclass(frozen=True)
class SpanningTree:
    edge_ids: frozenset

    def __post_init__(self):
        object.__setattr__(self, 'edge_ids', frozenset(self.edge_ids))

    def sorted_ids(self):
        return tuple(sorted(self.edge_ids))

    def __contains__(self, eid):
        return eid in self.edge_ids


@dataclass(frozen=True)
class VertexOrder:
    """w_0 = sink, w_1, ..., w_n."""
    order: tuple

    def __len__(self):
        return len(self.order)

    def __getitem__(self, index):
        return self.order[index]


@dataclass(frozen=True)
class ScanStage:
    """One Part-1 stage: the edges rejected while X was `burnt`, then the tree edge hit."""
    burnt: tuple
    rejected: tuple
    tree_edge: int
    vertex: int


def _fmt_set(vertices):
    return "{" + ",".join(str(v) for v in sorted(vertices)) + "}"


@dataclass
class SigmaStep:
    step: int
    burnt: tuple
    edge: int
    vertex: int
    value: int
    m: object
    threshold: object
    decision: str
    resolved: object = None

    def to_line(self):
        line = (f"step {self.step} X={_fmt_set(self.burnt)} edge=e{self.edge} "
                f"m={'undef' if self.m is None else self.m} "
                f"thresh={'undef' if self.threshold is None else self.threshold} decision={self.decision}")
        if self.resolved:
            line += f" resolved={self.resolved}"
        return line

    def to_dict(self):
        return {
            "step": self.step, "X": list(self.burnt), "edge": self.edge, "vertex": self.vertex,
            "value": self.value, "m": self.m, "threshold": self.threshold,
            "decision": self.decision, "resolved": self.resolved,
        }


@dataclass
class SigmaTrace:
    policy: AnomalyPolicy
    configuration: tuple
    steps: list = field(default_factory=list)
    accepted: list = field(default_factory=list)
    order: list = field(default_factory=lambda: [SINK])
    anomaly: object = None

    def lines(self):
        out = [step.to_line() for step in self.steps]
        if self.anomaly:
            out.append(f"anomaly {self.anomaly}")
        return out

    def to_dict(self):
        return {
            "policy": self.policy.to_dict(),
            "configuration": list(self.configuration),
            "steps": [step.to_dict() for step in self.steps],
            "accepted": list(self.accepted),
            "order": list(self.order),
            "anomaly": self.anomaly,
        }


@dataclass
class GammaStep:
    stage: int
    burnt: tuple
    pivot: int
    tree_edge: int
    rejected: tuple
    m: object
    count: int
    value: object
    note: object = None

    def to_line(self):
        line = (f"stage {self.stage} Y={_fmt_set(self.burnt)} pivot=v{self.pivot} edge=e{self.tree_edge} "
                f"rejected={','.join('e' + str(e) for e in self.rejected) or '-'} "
                f"m={'undef' if self.m is None else self.m} count={self.count} value={self.value}")
        if self.note:
            line += f" note={self.note}"
        return line

    def to_dict(self):
        return {
            "stage": self.stage, "Y": list(self.burnt), "pivot": self.pivot, "edge": self.tree_edge,
            "rejected": list(self.rejected), "m": self.m, "count": self.count,
            "value": self.value, "note": self.note,
        }


@dataclass
class GammaTrace:
    policy: AnomalyPolicy
    tree: tuple
    order: tuple = ()
    steps: list = field(default_factory=list)
    negative_vertices: list = field(default_factory=list)
    anomaly: object = None

    def lines(self):
        out = ["order " + " ".join(f"v{v}" for v in self.order)]
        out.extend(step.to_line() for step in self.steps)
        if self.negative_vertices:
            out.append("negative " + " ".join(f"v{v}" for v in self.negative_vertices))
        if self.anomaly:
            out.append(f"anomaly {self.anomaly}")
        return out

    def to_dict(self):
        return {
            "policy": self.policy.to_dict(),
            "tree": list(self.tree),
            "order": list(self.order),
            "steps": [step.to_dict() for step in self.steps],
            "negative_vertices": list(self.negative_vertices),
            "anomaly": self.anomaly,
        }


def check_spanning_tree(g, T):
    ids = T.edge_ids
    bad = [eid for eid in ids if not 1 <= eid <= g.edge_count]
    if bad:
        raise NotSpanningTreeError(f"Edge id e{min(bad)} outside e1..e{g.edge_count}")
    if len(ids) != g.n:
        raise NotSpanningTreeError(f"A spanning tree needs {g.n} edges, got {len(ids)}")
    labels = list(g.vertices)
    for eid in sorted(ids):
        a, b = g.edge(eid)
        if labels[a] == labels[b]:
            raise NotSpanningTreeError(f"Edge e{eid} closes a cycle")
        old, new = labels[b], labels[a]
        labels = [new if label == old else label for label in labels]


def _outside_end(g, eid, X):
    a, b = g.edge(eid)
    return b if a in X else a


def _rejections_into(g, R, v):
    return sum(1 for eid in R if v in g.edge(eid))


def _next_edge(g, X, R):
    """Minimum-id boundary edge of X not yet in R, or None."""
    for eid in boundary_edges(g, X):
        if eid not in R:
            return eid
    return None


def sigma_traced(g, h, D, policy=None, check=True):
    """
    Run sigma on D.

    Returns:
        tuple: (SpanningTree or None, SigmaTrace); None means an anomaly and
        trace.anomaly says where.

    Raises:
        NotRecurrentError: when check is on and D is not recurrent
    """
    policy = policy or DEFAULT_POLICY
    check_configuration(g, D)
    if check and not is_recurrent(g, h, D):
        raise NotRecurrentError(f"Configuration {list(D.chips)} is not recurrent")

    trace = SigmaTrace(policy, D.chips)
    X = {SINK}
    R = set()
    step = 0
    while len(X) < g.vertex_count:
        eid = _next_edge(g, X, R)
        if eid is None:
            trace.anomaly = f"stuck: every boundary edge of X={_fmt_set(X)} is rejected"
            return None, trace
        v = _outside_end(g, eid, X)
        outside = frozenset(g.vertices) - X
        m = min_loss(g, h, fire_set(g, D, X), v, within=outside, exempt_pivot=policy.pivot_exemption)
        threshold = None if m is None else m - (_rejections_into(g, R, v) + 1)
        value = D.value(v)
        step += 1

        if threshold is not None and value < threshold:
            decision, action = "reject", "reject"
        elif threshold is not None and value == threshold:
            decision, action = "accept", "accept"
        else:
            decision = "anomaly"
            action = {AnomalyAction.HALT: "halt", AnomalyAction.REJECT: "reject",
                      AnomalyAction.ACCEPT: "accept"}[policy.on_anomaly]

        trace.steps.append(SigmaStep(step, tuple(sorted(X)), eid, v, value, m, threshold, decision,
                                     resolved=action if decision == "anomaly" and action != "halt" else None))

        if action == "halt":
            reason = "m undefined" if m is None else f"D(v{v})={value} > threshold {threshold}"
            trace.anomaly = f"at e{eid}: {reason}"
            return None, trace
        if action == "reject":
            R.add(eid)
        else:
            trace.accepted.append(eid)
            trace.order.append(v)
            X.add(v)
            if policy.rejection_memory is RejectionMemory.RESET:
                R = set()

    return SpanningTree(frozenset(trace.accepted)), trace


def sigma(g, h, D, policy=None):
    """
    Spanning tree of recurrent D.

    Raises:
        NotRecurrentError, AnomalyError
    """
    tree, trace = sigma_traced(g, h, D, policy)
    if tree is None:
        raise AnomalyError(f"sigma anomaly on {list(D.chips)}: {trace.anomaly}", trace)
    return tree


def _scan_stage(g, T, X, R):
    """Reject non-tree boundary edges (in id order) until a tree edge turns up."""
    rejected = []
    while True:
        eid = _next_edge(g, X, R)
        if eid is None:
            raise ScanConsistencyError(f"No tree edge leaves X={_fmt_set(X)}")
        if eid in T:
            return tuple(rejected), eid
        R.add(eid)
        rejected.append(eid)


def gamma_order(g, T, memory=RejectionMemory.PERSISTENT):
    """
    Part 1 of gamma: scan boundary edges from the sink, rejecting non-tree
    edges; each tree edge met brings its outside endpoint into the order.

    Returns:
        tuple: (VertexOrder, list of ScanStage), stage k adds w_{k+1}
    """
    check_spanning_tree(g, T)
    X = {SINK}
    R = set()
    order = [SINK]
    stages = []
    while len(X) < g.vertex_count:
        burnt = tuple(sorted(X))
        rejected, eid = _scan_stage(g, T, X, R)
        v = _outside_end(g, eid, X)
        stages.append(ScanStage(burnt, rejected, eid, v))
        order.append(v)
        X.add(v)
        if memory is RejectionMemory.RESET:
            R = set()
    return VertexOrder(tuple(order)), stages


def _memory_before(stages, index, memory):
    if memory is RejectionMemory.RESET:
        return set()
    carried = set()
    for stage in stages[:index]:
        carried.update(stage.rejected)
    return carried


def gamma_traced(g, h, T, policy=None):
    """
    Run gamma on T: reconstruct D(w_n), D(w_{n-1}), ..., D(w_1) from the
    Part-1 order, each from the burning fixed point outside Y_i and the
    replayed edge scan at Y_i.

    Returns:
        tuple: (Configuration or None, GammaTrace)

    Raises:
        NotSpanningTreeError, ScanConsistencyError
    """
    policy = policy or DEFAULT_POLICY
    order, stages = gamma_order(g, T, policy.rejection_memory)
    trace = GammaTrace(policy, T.sorted_ids(), order.order)
    n = g.n
    chips = [0] * n

    for i in range(n):
        pivot = order[n - i]
        Y = frozenset(order.order[:n - i])
        stage = stages[n - i - 1]
        R = _memory_before(stages, n - i - 1, policy.rejection_memory)
        start = set(R)
        rejected, tree_edge = _scan_stage(g, T, set(Y), R)
        if rejected != stage.rejected or tree_edge != stage.tree_edge:
            raise ScanConsistencyError(
                f"Replayed scan at Y={_fmt_set(Y)} rejected {list(rejected)} then hit e{tree_edge}, "
                f"ordering pass rejected {list(stage.rejected)} then hit e{stage.tree_edge}"
            )
        if pivot not in g.edge(tree_edge):
            raise ScanConsistencyError(f"Tree edge e{tree_edge} at Y={_fmt_set(Y)} does not reach pivot v{pivot}")

        count = _rejections_into(g, start | set(rejected), pivot) + 1
        outside = frozenset(g.vertices) - Y
        note = None
        if policy.pivot_exemption:
            fired = fire_set(g, Configuration(tuple(chips)), Y)
            m = min_loss(g, h, fired, pivot, within=outside, exempt_pivot=True)
            value = None if m is None else m - count
        else:
            # pivot chips unknown: keep the stable values that satisfy the acceptance equation
            solutions = []
            m = None
            for candidate in range(g.degree(pivot)):
                chips[pivot - 1] = candidate
                fired = fire_set(g, Configuration(tuple(chips)), Y)
                m_candidate = min_loss(g, h, fired, pivot, within=outside, exempt_pivot=False)
                if m_candidate is not None and candidate == m_candidate - count:
                    solutions.append((candidate, m_candidate))
            chips[pivot - 1] = 0
            if solutions:
                value, m = solutions[0]
                if len(solutions) > 1:
                    note = "ambiguous:" + ",".join(str(c) for c, _ in solutions)
            else:
                value = None

        trace.steps.append(GammaStep(i, tuple(sorted(Y)), pivot, tree_edge, rejected, m, count, value, note))
        if value is None:
            trace.anomaly = f"no value for v{pivot} at Y={_fmt_set(Y)}"
            return None, trace
        chips[pivot - 1] = value
        if value < 0:
            trace.negative_vertices.append(pivot)

    return Configuration(tuple(chips)), trace


def gamma(g, h, T, policy=None):
    """
    Configuration for spanning tree T. Negative entries are returned as is
    (see GammaTrace.negative_vertices); callers decide how to report them.

    Raises:
        NotSpanningTreeError, ScanConsistencyError, AnomalyError
    """
    config, trace = gamma_traced(g, h, T, policy)
    if config is None:
        raise AnomalyError(f"gamma anomaly on tree {list(T.sorted_ids())}: {trace.anomaly}", trace)
    return config


@dataclass
class VerificationReport:
    policy: AnomalyPolicy
    recurrent_count: int
    tree_count: int
    failures: list = field(default_factory=list)

    @property
    def certified(self):
        return not self.failures

    def to_dict(self):
        return {
            "policy": self.policy.to_dict(),
            "certified": self.certified,
            "recurrent_count": self.recurrent_count,
            "tree_count": self.tree_count,
            "failures": self.failures,
        }


def verify_bijection(g, h, policy=None):
    """
    Run sigma on every recurrent configuration and gamma on every spanning
    tree and check that they are mutually inverse bijections. Failures are
    collected in the report, never raised.
    """
    # Import here to avoid circular import issues
    from chipfiring.oracle import enumerate_recurrent, enumerate_spanning_trees

    policy = policy or DEFAULT_POLICY
    recurrents = enumerate_recurrent(g, h)
    trees = enumerate_spanning_trees(g)
    report = VerificationReport(policy, len(recurrents), len(trees))
    failures = report.failures
    recurrent_set = set(recurrents)
    tree_set = set(trees)

    if len(recurrents) != len(trees):
        failures.append({"kind": "count-mismatch", "recurrents": len(recurrents), "trees": len(trees)})

    sigma_of = {}
    preimages = {}
    for D in recurrents:
        tree, trace = sigma_traced(g, h, D, policy, check=False)
        if tree is None:
            failures.append({"kind": "sigma-anomaly", "configuration": list(D.chips), "trace": trace.to_dict()})
            continue
        sigma_of[D] = tree
        preimages.setdefault(tree, []).append(D)
        order, _ = gamma_order(g, tree, policy.rejection_memory)
        if list(order.order) != trace.order:
            failures.append({
                "kind": "order-mismatch", "configuration": list(D.chips), "tree": list(tree.sorted_ids()),
                "sigma_order": trace.order, "gamma_order": list(order.order),
            })

    for tree, sources in sorted(preimages.items(), key=lambda item: item[0].sorted_ids()):
        if len(sources) > 1:
            failures.append({
                "kind": "sigma-collision", "tree": list(tree.sorted_ids()),
                "configurations": [list(D.chips) for D in sources],
            })

    gamma_of = {}
    gamma_preimages = {}
    for T in trees:
        try:
            D, trace = gamma_traced(g, h, T, policy)
        except ScanConsistencyError as e:
            failures.append({"kind": "gamma-scan-inconsistent", "tree": list(T.sorted_ids()), "error": str(e)})
            continue
        if D is None:
            failures.append({"kind": "gamma-anomaly", "tree": list(T.sorted_ids()), "trace": trace.to_dict()})
            continue
        gamma_of[T] = D
        gamma_preimages.setdefault(D, []).append(T)
        if D not in recurrent_set:
            failures.append({
                "kind": "gamma-not-recurrent", "tree": list(T.sorted_ids()), "configuration": list(D.chips),
                "negative_vertices": list(trace.negative_vertices), "trace": trace.to_dict(),
            })
        elif D in sigma_of and sigma_of[D] != T:
            failures.append({
                "kind": "sigma-gamma-mismatch", "tree": list(T.sorted_ids()), "configuration": list(D.chips),
                "sigma_tree": list(sigma_of[D].sorted_ids()),
            })

    for D, sources in sorted(gamma_preimages.items(), key=lambda item: item[0].chips):
        if len(sources) > 1:
            failures.append({
                "kind": "gamma-collision", "configuration": list(D.chips),
                "trees": [list(T.sorted_ids()) for T in sources],
            })

    for D, tree in sigma_of.items():
        if tree in gamma_of and gamma_of[tree] != D:
            failures.append({
                "kind": "gamma-sigma-mismatch", "configuration": list(D.chips), "tree": list(tree.sorted_ids()),
                "gamma_configuration": list(gamma_of[tree].chips),
            })

    if not failures:
        # with no collisions and equal counts these are automatic; kept as the final word
        if set(sigma_of.values()) != tree_set or set(gamma_of.values()) != recurrent_set:
            failures.append({"kind": "image-mismatch"})

    return report
