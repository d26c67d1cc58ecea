"""Python access to the assistive pick-and-place simulator."""

import json

from . import _core
from ._core import AssistError, ExperimentConfig, Server, class_names, fk, jacobian, ready_pose, region_grow

__all__ = [
    "AssistError",
    "ExperimentConfig",
    "Server",
    "class_names",
    "decode",
    "encode",
    "fk",
    "jacobian",
    "judge_place",
    "make_trial",
    "plan_to_table_pose",
    "ready_pose",
    "region_grow",
    "replay",
    "report",
    "run_trial",
    "run_trials",
]


def make_trial(config, object_class, trial):
    return json.loads(_core.make_trial(config, object_class, trial))


def run_trial(config, object_class, trial, mode="semiauto"):
    """Returns (record, command_log_text, transcript_text)."""
    record, log, transcript = _core.run_trial(config, object_class, trial, mode)
    return json.loads(record), log, transcript


def run_trials(config, classes=(), trials_per_class=5, mode="semiauto"):
    text = _core.run_trials(config, list(classes), trials_per_class, mode)
    return [json.loads(line) for line in text.splitlines() if line]


def replay(config, object_class, trial, mode, command_log):
    return _core.replay(config, object_class, trial, mode, command_log)


def report(records):
    """Returns (report_dict, text_table)."""
    doc, text = _core.report("".join(json.dumps(r) + "\n" for r in records))
    return json.loads(doc), text


def judge_place(final_center, target, half, yaw=0.0, round=False, margin=0.01):
    return _core.judge_place(final_center, target, half, yaw, round, margin)


def plan_to_table_pose(x, y, z, theta=0.0, seed=1):
    return _core.plan_to_table_pose(x, y, z, theta, seed)


def encode(seq, kind, payload):
    return _core.encode(seq, kind, json.dumps(payload))


def decode(line):
    seq, kind, payload = _core.decode(line)
    return seq, kind, json.loads(payload)
