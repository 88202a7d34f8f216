"""
Verify Corpus Main Module

Fans corpus instances out to a worker pool, prints one report per instance
in instance-key order (so the worker count never changes stdout), then a
summary line, and optionally saves every non-certified report as a
replayable JSON artifact.
"""

import json
from concurrent.futures import ProcessPoolExecutor, as_completed

from chipfiring.helper_functions import log_status
from chipfiring.verifyScripts.run_report import (
    instance_descriptor,
    instance_key,
    run_instance,
    save_artifact,
)


def _run_all(descriptors, workers):
    if workers <= 1:
        return [run_instance(d) for d in descriptors]
    reports = []
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(run_instance, d): d for d in descriptors}
        for future in as_completed(futures):
            reports.append(future.result())
            if len(reports) % 50 == 0:
                log_status(f"{len(reports)}/{len(descriptors)} instances done")
    return reports


def verify_corpus_main(instances, policies, workers=1, output_format="text", save_dir=None):
    """
    Args:
        instances (list): CorpusInstance objects
        policies (list): AnomalyPolicy objects; every instance runs under each
        workers (int): process pool size (1 runs in-process)
        output_format (str): 'text' or 'json'
        save_dir (str): directory for counterexample/error artifacts, or None

    Returns:
        tuple: (reports in key order, exit code)
    """
    descriptors = [instance_descriptor(inst, policy) for inst in instances for policy in policies]
    log_status(f"Verifying {len(descriptors)} instances with {workers} worker(s)")
    reports = sorted(_run_all(descriptors, workers), key=lambda r: instance_key(r.instance))

    for report in reports:
        if output_format == "json":
            data = report.to_dict()
            data.pop("wall_time")
            print(json.dumps(data, sort_keys=True))
        else:
            print(report.text_line())
        if save_dir and report.outcome != "certified":
            path = save_artifact(report, save_dir)
            log_status(f"Saved artifact: {path}", "📁")

    certified = sum(1 for r in reports if r.outcome == "certified")
    counterexamples = sum(1 for r in reports if r.outcome == "counterexample")
    errors = len(reports) - certified - counterexamples
    if output_format == "json":
        summary = {"instances": len(reports), "certified": certified,
                   "counterexample": counterexamples, "error": errors}
        print(json.dumps({"summary": summary}, sort_keys=True))
    else:
        print(f"summary instances={len(reports)} certified={certified} counterexample={counterexamples} error={errors}")

    if errors:
        log_status(f"{errors} instance(s) failed with input errors", "❌")
        return reports, 2
    if counterexamples:
        log_status(f"{counterexamples} instance(s) produced counterexamples", "⚠️")
        return reports, 1
    log_status("All instances certified", "✅")
    return reports, 0
