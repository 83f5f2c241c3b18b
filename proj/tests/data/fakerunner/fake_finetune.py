# Copyright 2026 The emoflow Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Stand-in for the fine-tune runner that speaks the same job protocol.

Train mode stores the training label frequencies as the "checkpoint";
predict mode returns them for every text. Used to exercise the process
boundary without model weights.
"""

import json
import os
import sys


def _rows(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def train(job):
    rows = _rows(job["train_file"])
    counts = [0] * len(job["labels"])
    for r in rows:
        counts[r["label"]] += 1
    prior = [c / len(rows) for c in counts]
    os.makedirs(job["output_dir"], exist_ok=True)
    with open(os.path.join(job["output_dir"], "prior.json"), "w") as f:
        json.dump(prior, f)
    epochs = job["config"]["epochs"]
    log = [{"epoch": e, "train_loss": 1.0 / e, "validation_loss": 1.0 / e,
            "validation_accuracy": max(prior)} for e in range(1, epochs + 1)]
    with open(job["result_file"], "w") as f:
        json.dump({"log": log, "selected_epoch": epochs}, f)


def predict(job):
    with open(os.path.join(job["model_dir"], "prior.json")) as f:
        prior = json.load(f)
    n = len(_rows(job["input_file"]))
    with open(job["output_file"], "w") as f:
        json.dump([prior] * n, f)


def main(argv):
    with open(argv[1]) as f:
        job = json.load(f)
    if os.environ.get("FAKE_RUNNER_FAIL"):
        return 3
    {"train": train, "predict": predict}[job["mode"]](job)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
