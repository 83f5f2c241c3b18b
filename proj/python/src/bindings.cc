//
// Copyright 2026 The emoflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Python bindings. Datasets cross the boundary as opaque handles; records,
// reports and run records come back as plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "emoflow/augment.h"
#include "emoflow/baseline.h"
#include "emoflow/ensemble.h"
#include "emoflow/experiment.h"
#include "emoflow/metrics.h"
#include "emoflow/preprocess.h"
#include "emoflow/splitprep.h"

namespace py = pybind11;
using namespace emoflow;

namespace {

py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict record_dict(const ReviewRecord& r) {
  py::dict d;
  d["id"] = r.id;
  d["text"] = r.text;
  d["label"] = std::string(label_name(r.label));
  d["provenance"] = r.provenance.kind == Provenance::Kind::kOriginal    ? "original"
                    : r.provenance.kind == Provenance::Kind::kAugmented ? "augmented"
                                                                        : "resampled";
  if (r.provenance.method) d["method"] = std::string(method_name(*r.provenance.method));
  if (!r.provenance.source_id.empty()) d["source_id"] = r.provenance.source_id;
  if (r.raw_text) d["raw_text"] = *r.raw_text;
  return d;
}

LabeledDataset from_rows(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::vector<ReviewRecord> records;
  records.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ReviewRecord r;
    r.id = "r" + std::to_string(i);
    r.text = rows[i].first;
    r.label = parse_label(rows[i].second);
    records.push_back(std::move(r));
  }
  return LabeledDataset(std::move(records));
}

py::dict counts_dict(const LabelCounts& counts) {
  py::dict d;
  for (auto l : kAllLabels) d[py::str(std::string(label_name(l)))] = counts[label_index(l)];
  return d;
}

py::dict report_dict(const MetricReport& m) {
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  py::dict per;
  for (std::size_t i = 0; i < m.per_label.size(); ++i) {
    py::dict l;
    l["precision"] = m.per_label[i].precision;
    l["recall"] = m.per_label[i].recall;
    l["f1"] = m.per_label[i].f1;
    l["support"] = m.per_label[i].support;
    per[py::str(std::string(label_name(label_from_index(i))))] = l;
  }
  d["per_label"] = per;
  return d;
}

std::vector<EmotionLabel> parse_labels(const std::vector<std::string>& names) {
  std::vector<EmotionLabel> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(parse_label(n));
  return out;
}

}  // namespace

PYBIND11_MODULE(_emoflow, m) {
  m.doc() = "Core of the emoflow emotion classification toolkit.";

  // Mapped by ErrorKind so stage-wrapped errors keep their class. The
  // exception objects live as long as the interpreter; never freed.
  static PyObject* base = PyErr_NewException("emoflow.EmoflowError", PyExc_RuntimeError, nullptr);
  static PyObject* by_kind[5] = {
      PyErr_NewException("emoflow.ConfigError", base, nullptr),
      PyErr_NewException("emoflow.DataError", base, nullptr),
      PyErr_NewException("emoflow.TranslationError", base, nullptr),
      PyErr_NewException("emoflow.TrainingError", base, nullptr),
      PyErr_NewException("emoflow.IoError", base, nullptr),
  };
  m.attr("EmoflowError") = py::handle(base);
  m.attr("ConfigError") = py::handle(by_kind[static_cast<int>(ErrorKind::kConfig)]);
  m.attr("DataError") = py::handle(by_kind[static_cast<int>(ErrorKind::kData)]);
  m.attr("TranslationError") = py::handle(by_kind[static_cast<int>(ErrorKind::kTranslation)]);
  m.attr("TrainingError") = py::handle(by_kind[static_cast<int>(ErrorKind::kTraining)]);
  m.attr("IoError") = py::handle(by_kind[static_cast<int>(ErrorKind::kIo)]);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(by_kind[static_cast<int>(e.kind())], e.what());
    }
  });

  std::vector<std::string> labels;
  for (auto l : kAllLabels) labels.emplace_back(label_name(l));
  m.attr("LABELS") = labels;

  py::class_<LabeledDataset>(m, "Dataset")
      .def(py::init(&from_rows), py::arg("rows"),
           "Builds a dataset from (text, label) pairs; ids are r0, r1, ...")
      .def("__len__", &LabeledDataset::size)
      .def("records",
           [](const LabeledDataset& ds) {
             py::list out;
             for (const auto& r : ds.records()) out.append(record_dict(r));
             return out;
           })
      .def("texts", &LabeledDataset::texts)
      .def("labels",
           [](const LabeledDataset& ds) {
             std::vector<std::string> out;
             for (auto l : ds.labels()) out.emplace_back(label_name(l));
             return out;
           })
      .def("label_counts", [](const LabeledDataset& ds) { return counts_dict(ds.label_counts()); })
      .def("fingerprint", &LabeledDataset::fingerprint)
      .def("save", [](const LabeledDataset& ds, const std::filesystem::path& p) {
        save_dataset(ds, p);
      });

  m.def(
      "load_dataset",
      [](const std::filesystem::path& path, const std::string& text_column,
         const std::string& label_column) {
        ColumnMap cols;
        if (!text_column.empty()) cols.text_column = text_column;
        if (!label_column.empty()) cols.label_column = label_column;
        return load_dataset(path, cols);
      },
      py::arg("path"), py::arg("text_column") = "", py::arg("label_column") = "");
  m.def("read_saved_dataset", &read_saved_dataset, py::arg("path"));

  m.def(
      "clean_text",
      [](const std::string& text, const std::vector<std::string>& stopwords,
         bool remove_stopwords, bool filter_alphabet, bool lowercase) {
        CleanConfig c;
        c.stopwords = Stoplist(stopwords.begin(), stopwords.end());
        c.remove_stopwords = remove_stopwords;
        c.filter_alphabet = filter_alphabet;
        c.lowercase = lowercase;
        return clean_pipeline(text, c);
      },
      py::arg("text"), py::arg("stopwords") = std::vector<std::string>{},
      py::arg("remove_stopwords") = false, py::arg("filter_alphabet") = true,
      py::arg("lowercase") = true);

  m.def("undersample", &undersample, py::arg("dataset"), py::arg("seed"));
  m.def(
      "stratified_split",
      [](const LabeledDataset& ds, double train, double validation, double test,
         std::uint64_t seed) {
        auto s = stratified_split(ds, SplitRatios{train, validation, test}, seed);
        return py::make_tuple(std::move(s.train), std::move(s.validation), std::move(s.test));
      },
      py::arg("dataset"), py::arg("train") = 0.8, py::arg("validation") = 0.1,
      py::arg("test") = 0.1, py::arg("seed") = 42);
  m.def("bootstrap_sample", &bootstrap_sample, py::arg("dataset"), py::arg("seed"));

  m.def(
      "compute_metrics",
      [](const std::vector<std::string>& y_true, const std::vector<std::string>& y_pred,
         const std::string& averaging) {
        const auto avg = averaging == "macro" ? Averaging::kMacro : Averaging::kWeighted;
        if (averaging != "macro" && averaging != "weighted") {
          throw ConfigError("averaging must be 'weighted' or 'macro'");
        }
        return report_dict(
            compute_metrics(confusion_matrix(parse_labels(y_true), parse_labels(y_pred)), avg));
      },
      py::arg("y_true"), py::arg("y_pred"), py::arg("averaging") = "weighted");

  py::class_<NaiveBayesModel>(m, "NaiveBayes")
      .def_static(
          "train",
          [](const LabeledDataset& ds, double alpha) {
            return NaiveBayesModel::train(ds, alpha, ModelMetadata{"baseline-nb", {}, ds.fingerprint()});
          },
          py::arg("dataset"), py::arg("alpha") = 1.0)
      .def_static("load", &NaiveBayesModel::load_from, py::arg("dir"))
      .def("predict_proba",
           [](const NaiveBayesModel& nb, const std::vector<std::string>& texts) {
             std::vector<std::vector<double>> out;
             for (const auto& p : nb.predict_proba(texts)) out.emplace_back(p.begin(), p.end());
             return out;
           })
      .def("predict",
           [](const NaiveBayesModel& nb, const std::vector<std::string>& texts) {
             std::vector<std::string> out;
             for (const auto& p : nb.predict_proba(texts)) {
               out.emplace_back(label_name(argmax_label(p)));
             }
             return out;
           })
      .def("save", &NaiveBayesModel::save, py::arg("dir"))
      .def_property_readonly("vocabulary_size",
                             [](const NaiveBayesModel& nb) { return nb.word_counts().size(); });

  py::class_<WordPieceTokenizer>(m, "WordPieceTokenizer")
      .def(py::init<std::vector<std::string>, bool>(), py::arg("vocab"),
           py::arg("do_lower_case") = true)
      .def_static("from_directory", &WordPieceTokenizer::from_directory, py::arg("dir"))
      .def("tokenize", &WordPieceTokenizer::tokenize, py::arg("text"))
      .def(
          "encode",
          [](const WordPieceTokenizer& t, const std::string& text, std::size_t max_length) {
            return t.encode(text, max_length);
          },
          py::arg("text"), py::arg("max_length") = kDefaultMaxLength)
      .def(
          "encode_batch",
          [](const WordPieceTokenizer& t, const std::vector<std::string>& texts,
             std::size_t max_length) {
            auto b = tokenize_batch(texts, t, max_length);
            return py::make_tuple(b.token_ids, b.attention_mask);
          },
          py::arg("texts"), py::arg("max_length") = kDefaultMaxLength);

  m.def(
      "load_config",
      [](const std::filesystem::path& path) { return to_python(config_to_json(load_config(path))); },
      py::arg("path"), "Parses, resolves and validates a config; returns it as a dict.");
  m.def(
      "config_hash",
      [](const std::filesystem::path& path) { return config_hash(load_config(path)); },
      py::arg("path"));
  m.def(
      "run_experiment",
      [](const std::filesystem::path& path, const std::string& out,
         std::optional<std::uint64_t> seed, bool overwrite) {
        auto c = load_config(path);
        if (seed) c.override_seed(*seed);
        if (!out.empty()) c.output_dir = out;
        RunOptions opts;
        opts.overwrite = overwrite;
        RunRecord r;
        {
          py::gil_scoped_release release;
          r = run_experiment(c, opts);
        }
        return to_python(run_record_to_json(r));
      },
      py::arg("config"), py::arg("out") = "", py::arg("seed") = py::none(),
      py::arg("overwrite") = false, "Runs every stage; returns the run record as a dict.");
  m.def(
      "load_run",
      [](const std::filesystem::path& dir) { return to_python(run_record_to_json(load_run(dir))); },
      py::arg("run_dir"));
  m.def(
      "evaluate_run",
      [](const std::filesystem::path& dir, const LabeledDataset& ds) {
        const auto ev = evaluate_run(dir, ds);
        auto d = report_dict(ev.report);
        d["loss"] = ev.loss;
        return d;
      },
      py::arg("run_dir"), py::arg("dataset"));
  m.def("render_report", &render_report, py::arg("output_dir"), py::arg("run_ids"),
        py::arg("report_dir"));
  m.def("exit_code_for_stage", &exit_code_for_stage, py::arg("stage"));
}
