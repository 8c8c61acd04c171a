// Copyright 2026 The IIKE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "iike/data.hpp"
#include "iike/evaluator.hpp"
#include "iike/trainer.hpp"

namespace iike::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kDiverged = 3,
};

struct DatasetOptions {
  std::filesystem::path train;
  std::filesystem::path valid;
  std::filesystem::path test;
  // A single confidence-scored dump split with partition_nell instead.
  std::filesystem::path nell_dump;
  bool confidence_column = false;
  std::uint64_t split_seed = 1;
  NellSplitSizes split_sizes;
};

KnowledgeBase load_dataset(const DatasetOptions& opts, SeedVocabularies seed = {});

enum class FilterSplit { kTrain, kAll };

struct TrainOptions {
  DatasetOptions data;
  TrainConfig config;
  std::string preset;  // "", "fb15k" or "nell"
  std::filesystem::path out_dir;
  std::size_t checkpoint_every = 0;
};

struct LinkPredictOptions {
  DatasetOptions data;
  std::filesystem::path embeddings;
  FilterSplit filter = FilterSplit::kAll;
  std::vector<std::size_t> hit_ks{10};
  std::size_t threads = 0;
  std::filesystem::path out_dir;
  bool dump_ranks = false;
};

struct ClassifyOptions {
  DatasetOptions data;
  std::filesystem::path embeddings;
  std::filesystem::path valid_labeled;
  std::filesystem::path test_labeled;
  std::uint64_t seed = 1;
  std::size_t max_attempts = 100;
  std::filesystem::path out_dir;
};

struct MakeClsSetOptions {
  DatasetOptions data;
  Split split = Split::kTest;
  std::uint64_t seed = 1;
  std::size_t max_attempts = 100;
  std::filesystem::path out;
};

struct SplitNellOptions {
  DatasetOptions data;
  std::filesystem::path out_dir;
};

struct ExportOptions {
  std::filesystem::path embeddings;
  std::filesystem::path out_dir;
};

struct ImportOptions {
  std::filesystem::path entities;
  std::filesystem::path relations;
  double bias = 7.0;
  Norm norm = Norm::kL2;
  std::filesystem::path out;
};

// Applies a named hyperparameter preset to `config`.
void apply_preset(const std::string& name, TrainConfig& config);

KbStats cmd_stats(const DatasetOptions& opts, std::ostream& out);
void cmd_split_nell(const SplitNellOptions& opts, std::ostream& out);
std::vector<LabeledExample> cmd_make_cls_set(const MakeClsSetOptions& opts, std::ostream& out);
TrainReport cmd_train(const TrainOptions& opts, std::ostream& out);
RankReport cmd_link_predict(const LinkPredictOptions& opts, std::ostream& out);
ClassifyReport cmd_classify(const ClassifyOptions& opts, std::ostream& out);
void cmd_export(const ExportOptions& opts, std::ostream& out);
void cmd_import(const ImportOptions& opts, std::ostream& out);

// Resolved training options in the TOML layout accepted by --config.
std::string train_manifest(const TrainOptions& opts);

// Full command-line entry point; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace iike::cli
