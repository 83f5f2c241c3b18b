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
"""Fine-tuning runner driven by emoflow's FineTuneBackend.

Invoked as ``python -m emoflow.finetune <job.json>``. A job is either
``train`` (fit a pretrained encoder with a 5-way head, write the best
checkpoint and the per-epoch log) or ``predict`` (softmax probabilities for
a list of texts).
"""

import copy
import json
import random
import sys
from pathlib import Path


def _read_jsonl(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def _device(torch, name):
    if name == "auto":
        return torch.device("cuda" if torch.cuda.is_available() else "cpu")
    return torch.device(name)


def _seed_everything(torch, seed):
    random.seed(seed)
    try:
        import numpy as np

        np.random.seed(seed % (2**32))
    except ImportError:
        pass
    torch.manual_seed(seed)
    if torch.cuda.is_available():
        torch.cuda.manual_seed_all(seed)


def _batches(n, batch_size, order=None):
    order = list(range(n)) if order is None else order
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def _evaluate(torch, model, tokenizer, rows, max_length, batch_size, device):
    model.eval()
    total_loss = 0.0
    correct = 0
    loss_fn = torch.nn.CrossEntropyLoss(reduction="sum")
    with torch.no_grad():
        for idx in _batches(len(rows), batch_size):
            texts = [rows[i]["text"] for i in idx]
            labels = torch.tensor([rows[i]["label"] for i in idx], device=device)
            enc = tokenizer(texts, truncation=True, max_length=max_length,
                            padding=True, return_tensors="pt").to(device)
            logits = model(**enc).logits
            total_loss += loss_fn(logits, labels).item()
            correct += (logits.argmax(dim=-1) == labels).sum().item()
    return total_loss / len(rows), correct / len(rows)


def _head_dropout(config, p):
    # BERT-family configs call it classifier_dropout, DistilBERT
    # seq_classif_dropout.
    if hasattr(config, "seq_classif_dropout"):
        config.seq_classif_dropout = p
    else:
        config.classifier_dropout = p


def train(job):
    import math

    import torch
    from transformers import (AutoConfig, AutoModelForSequenceClassification,
                              AutoTokenizer)

    cfg = job["config"]
    _seed_everything(torch, int(cfg["seed"]))
    device = _device(torch, job["device"])
    labels = job["labels"]

    tokenizer = AutoTokenizer.from_pretrained(job["model_dir"])
    config = AutoConfig.from_pretrained(
        job["model_dir"], num_labels=len(labels),
        id2label=dict(enumerate(labels)),
        label2id={name: i for i, name in enumerate(labels)})
    _head_dropout(config, float(cfg["dropout"]))
    model = AutoModelForSequenceClassification.from_pretrained(
        job["model_dir"], config=config, ignore_mismatched_sizes=True).to(device)

    optimizer = torch.optim.AdamW(model.parameters(), lr=float(cfg["learning_rate"]),
                                  weight_decay=float(cfg["weight_decay"]))
    train_rows = _read_jsonl(job["train_file"])
    val_rows = _read_jsonl(job["validation_file"])
    batch_size = int(cfg["batch_size"])
    max_length = int(job["max_length"])
    early = cfg.get("early_stopping", {})
    patience = int(early.get("patience", 0)) if early.get("enabled") else None

    generator = random.Random(int(cfg["seed"]))
    loss_fn = torch.nn.CrossEntropyLoss()
    log = []
    best_loss, best_epoch, best_state, since_best = math.inf, 0, None, 0
    for epoch in range(1, int(cfg["epochs"]) + 1):
        model.train()
        order = list(range(len(train_rows)))
        generator.shuffle(order)
        running, seen = 0.0, 0
        for idx in _batches(len(order), batch_size, order):
            texts = [train_rows[i]["text"] for i in idx]
            target = torch.tensor([train_rows[i]["label"] for i in idx], device=device)
            enc = tokenizer(texts, truncation=True, max_length=max_length,
                            padding=True, return_tensors="pt").to(device)
            loss = loss_fn(model(**enc).logits, target)
            if not math.isfinite(loss.item()):
                raise RuntimeError(f"non-finite training loss at epoch {epoch}")
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            running += loss.item() * len(idx)
            seen += len(idx)
        val_loss, val_acc = _evaluate(torch, model, tokenizer, val_rows, max_length,
                                      batch_size, device)
        log.append({"epoch": epoch, "train_loss": running / seen,
                    "validation_loss": val_loss, "validation_accuracy": val_acc})
        print(f"epoch {epoch}: train_loss={running / seen:.4f} "
              f"val_loss={val_loss:.4f} val_acc={val_acc:.4f}", file=sys.stderr)
        if val_loss < best_loss:
            best_loss, best_epoch, since_best = val_loss, epoch, 0
            if patience is not None:
                best_state = copy.deepcopy(model.state_dict())
        else:
            since_best += 1
            if patience is not None and since_best >= patience:
                break

    selected = len(log)
    if patience is not None and best_state is not None:
        model.load_state_dict(best_state)
        selected = best_epoch

    out = Path(job["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    Path(job["result_file"]).write_text(
        json.dumps({"log": log, "selected_epoch": selected}, indent=2))


def predict(job):
    import torch
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    device = _device(torch, job["device"])
    tokenizer = AutoTokenizer.from_pretrained(job["model_dir"])
    model = AutoModelForSequenceClassification.from_pretrained(job["model_dir"]).to(device)
    model.eval()
    rows = _read_jsonl(job["input_file"])
    probs = []
    with torch.no_grad():
        for idx in _batches(len(rows), 32):
            enc = tokenizer([rows[i]["text"] for i in idx], truncation=True,
                            max_length=int(job["max_length"]), padding=True,
                            return_tensors="pt").to(device)
            p = torch.softmax(model(**enc).logits.double(), dim=-1)
            probs.extend(p.cpu().tolist())
    Path(job["output_file"]).write_text(json.dumps(probs))


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m emoflow.finetune <job.json>", file=sys.stderr)
        return 2
    job = json.loads(Path(argv[0]).read_text())
    {"train": train, "predict": predict}[job["mode"]](job)
    return 0


if __name__ == "__main__":
    sys.exit(main())
