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
"""Emotion classification experiment toolkit.

The compiled core lives in ``emoflow._emoflow``; this package re-exports it.
``emoflow.finetune`` is the out-of-process fine-tuning runner.
"""

from emoflow._emoflow import (  # noqa: F401
    LABELS,
    ConfigError,
    DataError,
    Dataset,
    EmoflowError,
    IoError,
    NaiveBayes,
    TrainingError,
    TranslationError,
    WordPieceTokenizer,
    bootstrap_sample,
    clean_text,
    compute_metrics,
    config_hash,
    evaluate_run,
    exit_code_for_stage,
    load_config,
    load_dataset,
    load_run,
    read_saved_dataset,
    render_report,
    run_experiment,
    stratified_split,
    undersample,
)

__version__ = "0.1.0"
