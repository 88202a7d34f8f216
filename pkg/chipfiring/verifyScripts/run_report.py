"""
Run Report Module

One RunReport per (graph, model, edge ordering, policy) instance. Reports
embed the full instance so a saved counterexample artifact can be replayed
on its own; the JSON layout is versioned by the `schema` field.
"""

import hashlib
import json
import os
import time
from dataclasses import dataclass, field

from chipfiring.bijection import AnomalyPolicy, verify_bijection
from chipfiring.model import build_model
from chipfiring.multigraph import build_graph, graph_hash

SCHEMA_VERSION = 1


def instance_descriptor(instance, policy):
    """Plain-data description of a CorpusInstance; picklable for worker processes."""
    g = instance.graph
    return {
        "graph_name": instance.graph_name,
        "graph_hash": graph_hash(g),
        "vertex_count": g.vertex_count,
        "edges": [list(edge) for edge in g.edges],
        "model": instance.model_label,
        "maximal_sets": [sorted(block) for block in instance.cover.maximal_sets],
        "ordering": list(instance.ordering),
        "policy": policy.to_dict(),
    }


def instance_key(descriptor):
    return (descriptor["graph_name"], descriptor["model"], tuple(descriptor["ordering"]),
            json.dumps(descriptor["policy"], sort_keys=True))


@dataclass
class RunReport:
    instance: dict
    outcome: str
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    error: object = None
    wall_time: float = 0.0

    def to_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "instance": self.instance,
            "outcome": self.outcome,
            "counts": self.counts,
            "failures": self.failures,
            "error": self.error,
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"Unsupported report schema {data.get('schema')!r}, expected {SCHEMA_VERSION}")
        return cls(data["instance"], data["outcome"], data.get("counts", {}),
                   data.get("failures", []), data.get("error"), data.get("wall_time", 0.0))

    def comparable(self):
        """Everything except wall time."""
        data = self.to_dict()
        data.pop("wall_time")
        return data

    def text_line(self):
        inst = self.instance
        line = (f"{self.outcome} graph={inst['graph_name']}#{inst['graph_hash']} model={inst['model']} "
                f"order={','.join(str(e) for e in inst['ordering'])} "
                f"policy={AnomalyPolicy.from_dict(inst['policy']).describe()} "
                f"trees={self.counts.get('trees', '-')} recurrents={self.counts.get('recurrents', '-')} "
                f"failures={len(self.failures)}")
        if self.failures:
            line += " first=" + _failure_summary(self.failures[0])
        if self.error:
            line += f" error={self.error}"
        return line


def _failure_summary(failure):
    detail = failure.get("configuration") or failure.get("tree") or []
    return failure["kind"] + ("(" + ",".join(str(x) for x in detail) + ")" if detail else "")


def run_instance(descriptor):
    """Rebuild the instance from plain data and run verify_bijection on it."""
    start = time.perf_counter()
    try:
        g = build_graph(descriptor["vertex_count"], [tuple(edge) for edge in descriptor["edges"]])
        h = build_model(g, descriptor["maximal_sets"])
        policy = AnomalyPolicy.from_dict(descriptor["policy"])
        verification = verify_bijection(g, h, policy)
    except ValueError as e:
        return RunReport(descriptor, "error", error=str(e), wall_time=time.perf_counter() - start)

    outcome = "certified" if verification.certified else "counterexample"
    counts = {"trees": verification.tree_count, "recurrents": verification.recurrent_count}
    return RunReport(descriptor, outcome, counts, verification.failures,
                     wall_time=time.perf_counter() - start)


# cover labels look like `sets:1,2|3`; each separator keeps its own mark
_LABEL_MARKS = {":": "=", ",": "-", "|": "~"}


def _slug(text):
    return "".join(c if c.isalnum() or c in "+-=~" else _LABEL_MARKS.get(c, "_") for c in text)


def _instance_digest(instance):
    text = json.dumps(instance, sort_keys=True)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()[:8]


def artifact_name(report):
    """
    Unique per instance: the readable part names graph, cover and policy,
    the trailing digest covers the edge ordering (parallel edges permute
    into the same graph hash).
    """
    inst = report.instance
    policy = AnomalyPolicy.from_dict(inst["policy"]).describe().replace("/", "-")
    model = _slug(inst["model"])
    graph = _slug(os.path.basename(inst["graph_name"]))
    return f"{graph}_{inst['graph_hash']}_{model}_{policy}_{_instance_digest(inst)}.json"


def save_artifact(report, directory):
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, artifact_name(report))
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
    return path


def load_report(path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: not a JSON report ({e})")
    return RunReport.from_dict(data)


def replay(path):
    """
    Re-run the instance embedded in a saved report.

    Returns:
        tuple: (matches, saved RunReport, fresh RunReport)
    """
    saved = load_report(path)
    fresh = run_instance(saved.instance)
    return saved.comparable() == fresh.comparable(), saved, fresh


def outcome_exit_code(outcome):
    return {"certified": 0, "counterexample": 1}.get(outcome, 2)
