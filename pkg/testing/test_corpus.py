import json

import pytest

from chipfiring.bijection import AnomalyAction, AnomalyPolicy
from chipfiring.dynamics import is_recurrent, dualize
from chipfiring.model import asm_cover, cfm_cover
from chipfiring.oracle import count_spanning_trees, degree_box, enumerate_recurrent, enumerate_spanning_trees
from chipfiring.verifyScripts.build_corpus import (
    atlas_graphs,
    build_corpus,
    covers_for,
    default_graphs,
    edge_orderings,
    named_graphs,
)
from chipfiring.verifyScripts.run_report import (
    RunReport,
    artifact_name,
    instance_descriptor,
    replay,
    run_instance,
    save_artifact,
)
from chipfiring.verifyScripts.VerifyCorpusMain import verify_corpus_main


@pytest.fixture(scope="module")
def small_graphs():
    return default_graphs(4, seed=1)


def test_atlas_graphs_are_connected_and_seeded():
    graphs = atlas_graphs(4, seed=2)
    # 1 + 2 + 6 connected graphs on 2, 3, 4 vertices, each with a doubled twin
    assert len(graphs) == 18
    assert graphs == atlas_graphs(4, seed=2)
    for name, g in graphs.items():
        if name.endswith("+d"):
            base = graphs[name[:-2]]
            assert g.edge_count == base.edge_count + 1
    with pytest.raises(ValueError):
        atlas_graphs(8)


def test_named_graphs():
    graphs = named_graphs()
    assert count_spanning_trees(graphs["B3"]) == 3
    assert count_spanning_trees(graphs["P3"]) == 1
    assert count_spanning_trees(graphs["K4"]) == 16
    assert count_spanning_trees(graphs["C5"]) == 5


def test_covers_for(k4):
    labels = [label for label, _ in covers_for(k4, ["asm", "cfm", "all-antichains"])]
    assert labels[:2] == ["asm", "cfm"]
    assert len(labels) == 2 + 9
    with pytest.raises(ValueError):
        covers_for(k4, ["bogus"])


def test_edge_orderings_start_native(k4):
    orderings = edge_orderings(k4, 3, seed=5)
    assert orderings[0] == (1, 2, 3, 4, 5, 6)
    assert len(orderings) == 4
    assert all(sorted(o) == [1, 2, 3, 4, 5, 6] for o in orderings)
    assert orderings == edge_orderings(k4, 3, seed=5)


def test_counting_over_corpus(small_graphs):
    for g in small_graphs.values():
        trees = count_spanning_trees(g)
        assert trees == len(enumerate_spanning_trees(g))
        for _, h in covers_for(g, ["asm", "cfm", "all-antichains"]):
            assert len(enumerate_recurrent(g, h)) == trees


def test_duality_over_corpus(small_graphs):
    for g in small_graphs.values():
        asm, cfm = asm_cover(g), cfm_cover(g)
        for nu in degree_box(g):
            assert is_recurrent(g, asm, nu) == is_recurrent(g, cfm, dualize(g, nu))


def test_sandpile_corpus_is_certified(small_graphs, capsys):
    instances = build_corpus(small_graphs, ["asm"], orderings=2, seed=4)
    reports, code = verify_corpus_main(instances, [AnomalyPolicy()])
    assert code == 0
    assert all(report.outcome == "certified" for report in reports)
    assert capsys.readouterr().out.splitlines()[-1].startswith(f"summary instances={len(instances)} certified={len(instances)}")


def test_general_models_give_well_formed_reports(tmp_path, capsys):
    graphs = {name: g for name, g in named_graphs().items() if name in ("P3", "B3")}
    graphs.update({name: g for name, g in atlas_graphs(3).items()})
    instances = build_corpus(graphs, ["cfm", "all-antichains"], orderings=1, seed=3)
    reports, code = verify_corpus_main(instances, [AnomalyPolicy()], save_dir=str(tmp_path))
    assert code in (0, 1)
    for report in reports:
        assert report.outcome in ("certified", "counterexample")
        assert RunReport.from_dict(json.loads(json.dumps(report.to_dict()))).comparable() == report.comparable()
    saved_paths = list(tmp_path.iterdir())
    assert len(saved_paths) == sum(1 for report in reports if report.outcome != "certified")
    for path in saved_paths:
        matches, saved, fresh = replay(str(path))
        assert matches
        assert saved.outcome == fresh.outcome == "counterexample"


def test_worker_pool_does_not_change_output(small_graphs, capsys):
    graphs = {name: small_graphs[name] for name in ("K4", "C5", "B3")}
    instances = build_corpus(graphs, ["asm", "cfm"], orderings=1, seed=0)
    verify_corpus_main(instances, [AnomalyPolicy()], workers=1, output_format="json")
    sequential = capsys.readouterr().out
    verify_corpus_main(instances, [AnomalyPolicy()], workers=2, output_format="json")
    assert capsys.readouterr().out == sequential


def test_run_instance_reports_input_errors(k3):
    instance = build_corpus({"K3": k3}, ["asm"])[0]
    descriptor = instance_descriptor(instance, AnomalyPolicy())
    descriptor["maximal_sets"] = [[1]]
    report = run_instance(descriptor)
    assert report.outcome == "error"
    assert "not covered" in report.error


def test_saved_artifact_replays(k3, tmp_path):
    instance = build_corpus({"K3": k3}, ["cfm"])[0]
    report = run_instance(instance_descriptor(instance, AnomalyPolicy()))
    path = save_artifact(report, str(tmp_path))
    matches, saved, fresh = replay(path)
    assert matches and fresh.outcome == "counterexample"
    assert saved.failures[0]["configuration"] == [1, 0]


def test_artifact_names_are_unique_per_instance(k4, b3):
    instances = build_corpus({"K4": k4}, ["cfm", "all-antichains"], orderings=2, seed=1)
    instances += build_corpus({"B3": b3}, ["asm"], orderings=5, seed=1)
    policies = [AnomalyPolicy(), AnomalyPolicy(AnomalyAction.REJECT)]
    names = [
        artifact_name(RunReport(instance_descriptor(inst, policy), "counterexample"))
        for inst in instances for policy in policies
    ]
    assert len(set(names)) == len(names)
    assert any("sets=1-2~3" in name for name in names)


def test_edge_orderings_never_repeat(p3, b3):
    assert edge_orderings(p3, 5, seed=0) == [(1, 2), (2, 1)]
    orderings = edge_orderings(b3, 10, seed=2)
    assert len(orderings) == 6
    assert len(set(orderings)) == 6
    keys = [inst.key for inst in build_corpus({"B3": b3}, ["asm", "cfm"], orderings=10)]
    assert len(keys) == len(set(keys)) == 12


def test_json_output_is_pure_json_lines(k3, capsys):
    instances = build_corpus({"K3": k3}, ["asm", "cfm"])
    verify_corpus_main(instances, [AnomalyPolicy()], output_format="json")
    lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert lines[-1] == {"summary": {"instances": 2, "certified": 1, "counterexample": 1, "error": 0}}
    assert [line["outcome"] for line in lines[:-1]] == ["certified", "counterexample"]
