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

#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "iike/embedding_io.hpp"

namespace iike::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) throw ConfigError("an output directory is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory '" + dir.string() + "'");
  }
}

std::vector<RawRecord> read_optional(const fs::path& path, bool confidence) {
  if (path.empty()) return {};
  return parse_triples(path, 1.0, confidence);
}

std::string real17(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string toml_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Aligns a dataset with the row order of a stored embedding. Names the
// embedding does not cover are reported together.
struct AlignedData {
  EmbeddingFile embedding;
  KnowledgeBase kb;
};

AlignedData load_aligned(const fs::path& embeddings, const DatasetOptions& data) {
  AlignedData out{read_embeddings(embeddings), {}};
  SeedVocabularies seed{out.embedding.entities, out.embedding.relations};
  out.kb = load_dataset(data, std::move(seed));
  const std::size_t extra_e = out.kb.entity_count() - out.embedding.entities.size();
  const std::size_t extra_r = out.kb.relation_count() - out.embedding.relations.size();
  if (extra_e || extra_r) {
    std::string msg = "dataset names missing from '" + embeddings.string() + "':";
    std::size_t listed = 0;
    for (std::size_t e = out.embedding.entities.size(); e < out.kb.entity_count(); ++e) {
      if (listed++ < 50) msg += "\n  entity '" + out.kb.entities.name(EntityId(e)) + "'";
    }
    for (std::size_t r = out.embedding.relations.size(); r < out.kb.relation_count(); ++r) {
      if (listed++ < 50) msg += "\n  relation '" + out.kb.relations.name(RelationId(r)) + "'";
    }
    if (listed > 50) msg += "\n  ... " + std::to_string(listed - 50) + " more";
    msg += "\n(" + std::to_string(extra_e) + " entities, " + std::to_string(extra_r) +
           " relations in total)";
    throw DataError(msg);
  }
  return out;
}

std::vector<LabeledExample> load_or_make(const fs::path& labeled, const KnowledgeBase& kb,
                                         Split split, std::uint64_t seed,
                                         std::size_t max_attempts) {
  if (!labeled.empty()) {
    std::ifstream in(labeled, std::ios::binary);
    if (!in) throw DataError("cannot open '" + labeled.string() + "'");
    return read_labeled_tsv(in, kb, labeled.string());
  }
  if (split_of(kb, split).empty()) {
    throw DataError(std::string("no labeled file given and the ") +
                    (split == Split::kValid ? "valid" : "test") + " split is empty");
  }
  return make_classification_set(kb, split, seed, max_attempts);
}

}  // namespace

KnowledgeBase load_dataset(const DatasetOptions& opts, SeedVocabularies seed) {
  if (!opts.nell_dump.empty()) {
    auto records = parse_triples(opts.nell_dump, 1.0, true);
    auto parts = partition_nell(records, opts.split_seed, opts.split_sizes);
    return build_kb(parts.train, parts.valid, parts.test, std::move(seed));
  }
  auto train = read_optional(opts.train, opts.confidence_column);
  auto valid = read_optional(opts.valid, opts.confidence_column);
  auto test = read_optional(opts.test, opts.confidence_column);
  return build_kb(train, valid, test, std::move(seed));
}

void apply_preset(const std::string& name, TrainConfig& c) {
  if (name.empty()) return;
  if (name == "fb15k") {
    c.dim = 50;
    c.learning_rate = 0.002;
    c.bias = 7.0;
    c.norm = Norm::kL2;
  } else if (name == "nell") {
    c.dim = 100;
    c.learning_rate = 0.001;
    c.bias = 7.0;
    c.norm = Norm::kL1;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected fb15k or nell)");
  }
  // Not published; both presets use the default.
  c.negatives = 5;
}

KbStats cmd_stats(const DatasetOptions& opts, std::ostream& out) {
  auto kb = load_dataset(opts);
  auto stats = stats_of(kb);
  print_stats(out, stats);
  return stats;
}

void cmd_split_nell(const SplitNellOptions& opts, std::ostream& out) {
  if (opts.data.nell_dump.empty()) throw ConfigError("--nell is required");
  ensure_dir(opts.out_dir);
  auto records = parse_triples(opts.data.nell_dump, 1.0, true);
  auto parts = partition_nell(records, opts.data.split_seed, opts.data.split_sizes);
  for (auto [name, list] : {std::pair{"train.tsv", &parts.train}, std::pair{"valid.tsv", &parts.valid},
                            std::pair{"test.tsv", &parts.test}}) {
    auto f = open_output(opts.out_dir / name);
    write_raw_tsv(f, *list);
  }
  print_stats(out, stats_of(build_kb(parts.train, parts.valid, parts.test)));
}

std::vector<LabeledExample> cmd_make_cls_set(const MakeClsSetOptions& opts, std::ostream& out) {
  auto kb = load_dataset(opts.data);
  if (split_of(kb, opts.split).empty()) throw DataError("the requested split is empty");
  auto examples = make_classification_set(kb, opts.split, opts.seed, opts.max_attempts);
  if (opts.out.empty()) {
    write_labeled_tsv(out, kb, examples);
  } else {
    auto f = open_output(opts.out);
    write_labeled_tsv(f, kb, examples);
    out << "examples\t" << examples.size() << '\n';
  }
  return examples;
}

std::string train_manifest(const TrainOptions& o) {
  const auto& c = o.config;
  std::ostringstream m;
  m << "# iike training run; re-run with: iike train --config <this file>\n"
    << "[train]\n";
  for (auto [key, path] : {std::pair{"train", &o.data.train}, std::pair{"valid", &o.data.valid},
                           std::pair{"test", &o.data.test}, std::pair{"nell", &o.data.nell_dump}}) {
    if (!path->empty()) m << key << '=' << toml_string(path->string()) << '\n';
  }
  if (!o.preset.empty()) m << "preset=" << toml_string(o.preset) << '\n';
  m << "confidence=" << (o.data.confidence_column ? "true" : "false") << '\n'
    << "split-seed=" << o.data.split_seed << '\n'
    << "valid-size=" << o.data.split_sizes.valid << '\n'
    << "test-size=" << o.data.split_sizes.test << '\n'
    << "dim=" << c.dim << '\n'
    << "negatives=" << c.negatives << '\n'
    << "lr=" << real17(c.learning_rate) << '\n'
    << "threshold=" << real17(c.convergence_threshold) << '\n'
    << "max-epochs=" << c.max_epochs << '\n'
    << "bias=" << real17(c.bias) << '\n'
    << "norm=" << toml_string(to_string(c.norm)) << '\n'
    << "epsilon=" << real17(c.epsilon) << '\n'
    << "norm-floor=" << real17(c.norm_floor) << '\n'
    << "seed=" << c.seed << '\n'
    << "shuffle=" << (c.shuffle_each_epoch ? "true" : "false") << '\n'
    << "loss-mode=" << toml_string(to_string(c.loss_mode)) << '\n'
    << "filter-negatives=" << (c.filter_negatives ? "true" : "false") << '\n'
    << "renormalize=" << (c.renormalize_each_epoch ? "true" : "false") << '\n'
    << "checkpoint-every=" << o.checkpoint_every << '\n'
    << "out-dir=" << toml_string(o.out_dir.string()) << '\n';
  return m.str();
}

TrainReport cmd_train(const TrainOptions& opts, std::ostream& out) {
  opts.config.validate();
  ensure_dir(opts.out_dir);
  auto kb = load_dataset(opts.data);
  {
    auto f = open_output(opts.out_dir / "manifest.toml");
    f << train_manifest(opts);
  }
  auto trace = open_output(opts.out_dir / "loss.csv");
  trace << "epoch,total_loss,rel_change,seconds\n";

  auto on_epoch = [&](const EpochStats& s, const EmbeddingSpace& space) {
    trace << s.epoch << ',' << real17(s.total_loss) << ','
          << (std::isnan(s.rel_change) ? std::string() : real17(s.rel_change)) << ','
          << s.seconds << '\n';
    trace.flush();
    if (opts.checkpoint_every && s.epoch % opts.checkpoint_every == 0) {
      write_embeddings(opts.out_dir / ("checkpoint_" + std::to_string(s.epoch) + ".txt"),
                       kb.entities, kb.relations, space);
    }
  };
  auto result = train(kb, opts.config, on_epoch);
  write_embeddings(opts.out_dir / "embeddings.txt", kb.entities, kb.relations, result.space);

  const auto& r = result.report;
  out << "epochs\t" << r.epochs_run << '\n'
      << "final_loss\t" << real17(r.epochs.back().total_loss) << '\n'
      << "final_rel_change\t"
      << (std::isnan(r.final_rel_change) ? std::string("nan") : real17(r.final_rel_change))
      << '\n'
      << "seconds\t" << r.wall_seconds << '\n';
  return r;
}

RankReport cmd_link_predict(const LinkPredictOptions& opts, std::ostream& out) {
  auto data = load_aligned(opts.embeddings, opts.data);
  const auto& kb = data.kb;
  if (kb.test.empty()) throw DataError("test split is empty");

  TripleIndex train_only;
  const TripleIndex* filter = &kb.all_triples;
  if (opts.filter == FilterSplit::kTrain) {
    std::span<const Belief> only[] = {kb.train};
    train_only = TripleIndex::from(only);
    filter = &train_only;
  }
  LinkPredictionOptions lp{opts.hit_ks, opts.threads};
  auto report = link_prediction(data.embedding.space, *filter, kb.test, lp);
  print_rank_report(out, report);
  if (!opts.out_dir.empty()) {
    ensure_dir(opts.out_dir);
    auto table = open_output(opts.out_dir / "link_prediction.txt");
    print_rank_report(table, report);
    auto csv = open_output(opts.out_dir / "link_prediction.csv");
    write_rank_csv(csv, report);
    if (opts.dump_ranks) {
      auto dump = open_output(opts.out_dir / "ranks.tsv");
      write_rank_dump(dump, report, kb.test, kb);
    }
  }
  return report;
}

ClassifyReport cmd_classify(const ClassifyOptions& opts, std::ostream& out) {
  auto data = load_aligned(opts.embeddings, opts.data);
  const auto& kb = data.kb;
  auto valid = load_or_make(opts.valid_labeled, kb, Split::kValid, opts.seed, opts.max_attempts);
  auto test = load_or_make(opts.test_labeled, kb, Split::kTest, opts.seed + 1, opts.max_attempts);
  if (valid.empty()) throw DataError("validation set is empty");

  const auto& space = data.embedding.space;
  auto thresholds = fit_thresholds(space, valid);
  auto report = classify(space, thresholds, test);
  print_classify_report(out, report);
  if (!opts.out_dir.empty()) {
    ensure_dir(opts.out_dir);
    auto table = open_output(opts.out_dir / "classify.txt");
    print_classify_report(table, report);
    auto csv = open_output(opts.out_dir / "classify.csv");
    write_classify_csv(csv, report);
    auto pr = open_output(opts.out_dir / "pr.csv");
    write_pr_csv(pr, report.pr_curve);
    auto th = open_output(opts.out_dir / "thresholds.tsv");
    write_thresholds_tsv(th, report.thresholds, kb.relations);
  }
  return report;
}

void cmd_export(const ExportOptions& opts, std::ostream& out) {
  auto file = read_embeddings(opts.embeddings);
  ensure_dir(opts.out_dir);
  const auto& s = file.space;
  {
    auto f = open_output(opts.out_dir / "entity2vec.tsv");
    write_vector_table(f, file.entities.names(), s.entity_data(), s.dim());
  }
  {
    auto f = open_output(opts.out_dir / "relation2vec.tsv");
    write_vector_table(f, file.relations.names(), s.relation_data(), s.dim());
  }
  out << "entities\t" << s.entity_count() << '\n'
      << "relations\t" << s.relation_count() << '\n'
      << "dim\t" << s.dim() << '\n';
}

void cmd_import(const ImportOptions& opts, std::ostream& out) {
  auto read_table = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open '" + p.string() + "'");
    return read_vector_table(in, p.string());
  };
  auto ents = read_table(opts.entities);
  auto rels = read_table(opts.relations);
  if (ents.names.empty() || rels.names.empty()) throw DataError("empty vector table");
  if (ents.dim != rels.dim) {
    throw DataError("entity dimension " + std::to_string(ents.dim) +
                    " differs from relation dimension " + std::to_string(rels.dim));
  }
  ScoringParams params;
  params.bias = opts.bias;
  params.norm = opts.norm;
  EmbeddingFile file{{}, {}, EmbeddingSpace(ents.names.size(), rels.names.size(), ents.dim, params)};
  for (const auto& n : ents.names) {
    if (file.entities.intern(n).index() + 1 != file.entities.size()) {
      throw DataError("duplicate entity '" + n + "'");
    }
  }
  for (const auto& n : rels.names) {
    if (file.relations.intern(n).index() + 1 != file.relations.size()) {
      throw DataError("duplicate relation '" + n + "'");
    }
  }
  std::copy(ents.data.begin(), ents.data.end(), file.space.entity_data().begin());
  std::copy(rels.data.begin(), rels.data.end(), file.space.relation_data().begin());
  if (opts.out.empty()) {
    write_embeddings(out, file.entities, file.relations, file.space);
  } else {
    write_embeddings(opts.out, file.entities, file.relations, file.space);
    out << "entities\t" << file.space.entity_count() << '\n'
        << "relations\t" << file.space.relation_count() << '\n'
        << "dim\t" << file.space.dim() << '\n';
  }
}

namespace {

void add_dataset_options(CLI::App* cmd, DatasetOptions& d, bool with_split_flags = true) {
  cmd->add_option("--train", d.train, "Training triples (TSV)")->check(CLI::ExistingFile);
  cmd->add_option("--valid", d.valid, "Validation triples (TSV)")->check(CLI::ExistingFile);
  cmd->add_option("--test", d.test, "Test triples (TSV)")->check(CLI::ExistingFile);
  cmd->add_flag("--confidence", d.confidence_column,
                "Input files carry a 4th confidence column");
  auto* nell = cmd->add_option("--nell", d.nell_dump,
                               "Confidence-scored dump to split into train/valid/test")
                   ->check(CLI::ExistingFile);
  nell->excludes(cmd->get_option("--train"));
  if (with_split_flags) {
    cmd->add_option("--split-seed", d.split_seed, "Seed for the ground-truth shuffle")
        ->capture_default_str();
    cmd->add_option("--valid-size", d.split_sizes.valid, "Validation beliefs drawn from a dump")
        ->capture_default_str();
    cmd->add_option("--test-size", d.split_sizes.test, "Test beliefs drawn from a dump")
        ->capture_default_str();
  }
}

const std::map<std::string, Norm> kNorms{{"L1", Norm::kL1}, {"L2", Norm::kL2},
                                         {"l1", Norm::kL1}, {"l2", Norm::kL2}};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Confidence-weighted knowledge-graph embedding: training and evaluation"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  DatasetOptions stats_data;
  auto* stats = app.add_subcommand("stats", "Print entity/relation/split counts");
  add_dataset_options(stats, stats_data);

  SplitNellOptions split_opts;
  auto* split = app.add_subcommand("split-nell", "Split a confidence-scored dump");
  add_dataset_options(split, split_opts.data);
  split->add_option("--out-dir", split_opts.out_dir, "Directory for train/valid/test.tsv")
      ->required();

  MakeClsSetOptions cls_opts;
  std::string cls_split = "test";
  auto* make_cls = app.add_subcommand("make-cls-set", "Generate a labeled classification set");
  add_dataset_options(make_cls, cls_opts.data);
  make_cls->add_option("--split", cls_split, "valid or test")
      ->check(CLI::IsMember({"valid", "test"}))
      ->capture_default_str();
  make_cls->add_option("--seed", cls_opts.seed)->capture_default_str();
  make_cls->add_option("--max-attempts", cls_opts.max_attempts)->capture_default_str();
  make_cls->add_option("--out", cls_opts.out, "Output TSV (default: stdout)");

  TrainOptions train_opts;
  std::string norm_name = "L2", loss_mode = "sampled";
  auto* train_cmd = app.add_subcommand("train", "Train embeddings");
  add_dataset_options(train_cmd, train_opts.data);
  auto& tc = train_opts.config;
  train_cmd->add_option("--preset", train_opts.preset, "fb15k or nell hyperparameters")
      ->check(CLI::IsMember({"", "fb15k", "nell"}));
  auto* o_dim = train_cmd->add_option("--dim", tc.dim, "Embedding dimension")->capture_default_str();
  auto* o_k = train_cmd->add_option("--negatives,-k", tc.negatives, "Negatives per position")
                  ->capture_default_str();
  auto* o_lr = train_cmd->add_option("--lr", tc.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--threshold", tc.convergence_threshold, "Relative loss change to stop at")
      ->capture_default_str();
  train_cmd->add_option("--max-epochs", tc.max_epochs)->capture_default_str();
  auto* o_bias = train_cmd->add_option("--bias", tc.bias)->capture_default_str();
  auto* o_norm = train_cmd->add_option("--norm", norm_name)
                     ->check(CLI::IsMember({"L1", "L2", "l1", "l2"}))
                     ->capture_default_str();
  train_cmd->add_option("--epsilon", tc.epsilon, "Logistic offset")->capture_default_str();
  train_cmd->add_option("--norm-floor", tc.norm_floor)->capture_default_str();
  train_cmd->add_option("--seed", tc.seed)->capture_default_str();
  train_cmd->add_option("--shuffle", tc.shuffle_each_epoch, "Shuffle training order each epoch")
      ->capture_default_str();
  train_cmd->add_option("--loss-mode", loss_mode, "sampled or exact")
      ->check(CLI::IsMember({"sampled", "exact"}))
      ->capture_default_str();
  train_cmd->add_option("--filter-negatives", tc.filter_negatives,
                        "Redraw negatives that are known triples")
      ->capture_default_str();
  train_cmd->add_option("--renormalize", tc.renormalize_each_epoch,
                        "Rescale vectors to unit length after every epoch")
      ->capture_default_str();
  train_cmd->add_option("--checkpoint-every", train_opts.checkpoint_every,
                        "Write embeddings every m epochs (0 = off)")
      ->capture_default_str();
  train_cmd->add_option("--out-dir", train_opts.out_dir)->required();

  LinkPredictOptions lp_opts;
  std::string filter_split = "all";
  auto* lp = app.add_subcommand("link-predict", "Raw/filtered mean rank and Hit@K");
  add_dataset_options(lp, lp_opts.data);
  lp->add_option("--embeddings", lp_opts.embeddings)->required()->check(CLI::ExistingFile);
  lp->add_option("--filter-split", filter_split, "Known triples used for filtering: train or all")
      ->check(CLI::IsMember({"train", "all"}))
      ->capture_default_str();
  lp->add_option("--hit-k", lp_opts.hit_ks, "Comma-separated K values")->delimiter(',');
  lp->add_option("--threads", lp_opts.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  lp->add_option("--out-dir", lp_opts.out_dir);
  lp->add_flag("--dump-ranks", lp_opts.dump_ranks, "Write per-triple ranks.tsv");

  ClassifyOptions cl_opts;
  auto* cl = app.add_subcommand("classify", "Relation-specific threshold classification");
  add_dataset_options(cl, cl_opts.data);
  cl->add_option("--embeddings", cl_opts.embeddings)->required()->check(CLI::ExistingFile);
  cl->add_option("--valid-labeled", cl_opts.valid_labeled)->check(CLI::ExistingFile);
  cl->add_option("--test-labeled", cl_opts.test_labeled)->check(CLI::ExistingFile);
  cl->add_option("--seed", cl_opts.seed, "Seed for generated labeled sets")->capture_default_str();
  cl->add_option("--max-attempts", cl_opts.max_attempts)->capture_default_str();
  cl->add_option("--out-dir", cl_opts.out_dir);

  ExportOptions ex_opts;
  auto* ex = app.add_subcommand("export", "Write entity2vec.tsv and relation2vec.tsv");
  ex->add_option("--embeddings", ex_opts.embeddings)->required()->check(CLI::ExistingFile);
  ex->add_option("--out-dir", ex_opts.out_dir)->required();

  ImportOptions im_opts;
  std::string im_norm = "L2";
  auto* im = app.add_subcommand("import", "Build an embedding file from vector tables");
  im->add_option("--entities", im_opts.entities)->required()->check(CLI::ExistingFile);
  im->add_option("--relations", im_opts.relations)->required()->check(CLI::ExistingFile);
  im->add_option("--bias", im_opts.bias)->capture_default_str();
  im->add_option("--norm", im_norm)->check(CLI::IsMember({"L1", "L2", "l1", "l2"}));
  im->add_option("--out", im_opts.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (stats->parsed()) {
      cmd_stats(stats_data, out);
    } else if (split->parsed()) {
      cmd_split_nell(split_opts, out);
    } else if (make_cls->parsed()) {
      cls_opts.split = parse_split(cls_split);
      cmd_make_cls_set(cls_opts, out);
    } else if (train_cmd->parsed()) {
      // Explicit flags win over the preset.
      TrainConfig explicit_values = tc;
      const bool norm_given = o_norm->count() > 0;
      apply_preset(train_opts.preset, tc);
      if (o_dim->count()) tc.dim = explicit_values.dim;
      if (o_k->count()) tc.negatives = explicit_values.negatives;
      if (o_lr->count()) tc.learning_rate = explicit_values.learning_rate;
      if (o_bias->count()) tc.bias = explicit_values.bias;
      if (norm_given || train_opts.preset.empty()) tc.norm = kNorms.at(norm_name);
      tc.loss_mode = parse_loss_mode(loss_mode);
      cmd_train(train_opts, out);
    } else if (lp->parsed()) {
      lp_opts.filter = filter_split == "train" ? FilterSplit::kTrain : FilterSplit::kAll;
      cmd_link_predict(lp_opts, out);
    } else if (cl->parsed()) {
      cmd_classify(cl_opts, out);
    } else if (ex->parsed()) {
      cmd_export(ex_opts, out);
    } else if (im->parsed()) {
      im_opts.norm = kNorms.at(im_norm);
      cmd_import(im_opts, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace iike::cli
