// Copyright 2026 The wfner Authors.
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

// wfner: corpus tooling for nested NER over bioinformatics workflow articles.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wfner/corpus_io.hpp"
#include "wfner/evaluation.hpp"
#include "wfner/experiment.hpp"
#include "wfner/gazetteer.hpp"
#include "wfner/io.hpp"
#include "wfner/mapping.hpp"
#include "wfner/stats.hpp"
#include "wfner/tagger.hpp"

namespace fs = std::filesystem;
using namespace wfner;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Thrown for flag combinations CLI11 cannot express; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    write_file_atomic(out_path, content);
  }
}

std::optional<std::set<std::string>> parse_focus(const std::string& csv) {
  if (csv.empty()) return std::nullopt;
  std::set<std::string> labels;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) {
    auto t = std::string(detail::trim(item));
    if (t.empty()) continue;
    if (!SchemaDef::biotoflow().has_base(t)) throw UsageError("unknown label in --focus: " + t);
    labels.insert(t);
  }
  return labels;
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

// Appends `--key value` for every entry of a JSON config object whose flag
// was not given on the command line, so explicit flags always win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string config_path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (config_path.empty()) return kept;
  const auto config = read_json(config_path);
  if (!config.is_object()) throw UsageError("--config file must hold a JSON object");

  auto given = [&](const std::string& flag) {
    for (const auto& a : kept) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  for (const auto& [key, value] : config.items()) {
    const auto flag = "--" + key;
    if (given(flag)) continue;
    auto scalar = [](const nlohmann::json& v) {
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) kept.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        kept.push_back(flag);
        kept.push_back(scalar(v));
      }
    } else if (!value.is_null()) {
      kept.push_back(flag);
      kept.push_back(scalar(value));
    }
  }
  return kept;
}

Gazetteer load_gazetteer(const std::string& path) { return Gazetteer::from_json(read_json(path)); }

RuleSet load_rules(const std::string& path) {
  return path.empty() ? RuleSet::defaults() : RuleSet::from_json(read_json(path));
}

struct Options {
  unsigned jobs = 1;
  // Shared by several subcommands.
  std::string corpus, out, format = "json", mode = "both", focus, table, report_out;
  bool strict = false, schema_check = false, qualifiers = false, macro = false;
  // eval / iaa
  std::string gold, pred, a, b, diff, run_out, manifest, meta;
  int split_id = 0;
  long long seed_model = 0;
  // split
  int n_splits = 5;
  std::uint64_t seed = 0;
  double train_frac = 0.75, dev_frac = 1.0 / 3.0;
  // gazetteer / tag / silver
  std::vector<std::string> sources;
  std::string gazetteer, rules, common_words, text, predictions, predictions_jsonl, jsonl;
  std::size_t min_length = 2;
  bool keep_numeric = false, keep_common = false, subwords = false;
  // fuse
  std::vector<std::string> gold_dirs, converted_dirs, silver_dirs;
  bool no_prefix = false;
  // report
  std::vector<std::string> runs;
  std::string layout = "text", json_out;
  bool per_split = false;
  // defaults
  std::string what;
};

int cmd_validate(const Options& o) {
  const auto corpus = read_corpus(o.corpus, o.jobs);
  const auto violations =
      validate_corpus(corpus, o.schema_check ? &SchemaDef::biotoflow() : nullptr);
  std::string out;
  for (const auto& v : violations) out += to_string(v) + "\n";
  emit(o.out, out);
  std::cerr << corpus.documents.size() << " documents, " << violations.size() << " violations\n";
  return violations.empty() ? kExitOk : kExitFailure;
}

int cmd_stats(const Options& o) {
  const auto report = corpus_stats(read_corpus(o.corpus, o.jobs));
  emit(o.out, report.to_json().dump(2) + "\n");
  return kExitOk;
}

int cmd_convert(const Options& o) {
  const auto corpus = read_corpus(o.corpus, o.jobs);
  const auto table = o.table.empty() ? default_softcite_table()
                                     : MappingTable::from_json(read_json(o.table));
  ConvertOptions copts;
  copts.strict = o.strict;
  auto result = convert_corpus(corpus, table, copts);
  write_corpus(result.corpus, o.out);
  const auto report = result.report.to_json().dump(2) + "\n";
  if (o.report_out.empty()) {
    std::cout << report;
  } else {
    write_file_atomic(o.report_out, report);
  }
  return kExitOk;
}

int cmd_split(const Options& o) {
  const auto corpus = read_corpus(o.corpus, o.jobs);
  const auto manifests = make_splits(corpus, o.n_splits, o.seed, {o.train_frac, o.dev_frac});
  for (const auto& m : manifests) {
    const auto path = fs::path(o.out) / ("split_" + std::to_string(m.split_id) + ".json");
    write_file_atomic(path, m.to_json().dump(2) + "\n");
    std::cout << path.string() << "\ttrain=" << m.train_ids.size() << "\tdev=" << m.dev_ids.size()
              << "\ttest=" << m.test_ids.size() << "\n";
  }
  return kExitOk;
}

std::vector<MatchMode> modes_of(const std::string& mode) {
  if (mode == "both") return {MatchMode::strict, MatchMode::relaxed};
  if (auto m = parse_match_mode(mode)) return {*m};
  throw UsageError("--mode must be strict, relaxed or both");
}

int run_scoring(const Options& o, const Corpus& gold, const Corpus& pred) {
  const auto modes = modes_of(o.mode);
  nlohmann::ordered_json j;
  std::string text, diff;
  std::vector<MatchReport> reports;
  for (auto mode : modes) {
    ScoreOptions sopts;
    sopts.mode = mode;
    sopts.label_filter = parse_focus(o.focus);
    sopts.qualifier_sensitive = o.qualifiers;
    sopts.averaging = o.macro ? Averaging::macro : Averaging::micro;
    sopts.jobs = o.jobs;
    auto report = score(gold, pred, sopts);
    j[std::string(to_string(mode))] = report.to_json();
    if (!text.empty()) text += "\n";
    text += render_report(report);
    if (sopts.label_filter) {
      // The unrestricted Overall row is shown next to the focused one.
      auto all = report;
      all.label_filter.reset();
      all.finalize();
      text += "Overall (all labels): P " + percent(all.overall.p) + "  R " +
              percent(all.overall.r) + "  F1 " + percent(all.overall.f1) + "\n";
    }
    diff += "# mode " + std::string(to_string(mode)) + "\n" + render_diff(report);
    reports.push_back(std::move(report));
  }
  if (o.format == "text") {
    emit(o.out, text);
  } else if (o.format == "json") {
    emit(o.out, j.dump(2) + "\n");
  } else {
    throw UsageError("--format must be json or text");
  }
  if (!o.diff.empty()) write_file_atomic(o.diff, diff);
  if (!o.run_out.empty()) {
    if (reports.size() != 1) throw UsageError("--run-out needs a single --mode");
    RunResult run;
    run.split_id = o.split_id;
    run.seed_model = o.seed_model;
    run.manifest = o.manifest;
    run.report = reports.front();
    if (!o.meta.empty()) run.meta = read_json(o.meta);
    write_file_atomic(o.run_out, run.to_json().dump(2) + "\n");
  }
  return kExitOk;
}

// Restricts the gold corpus to the documents present in a prediction
// directory when a manifest selects a test set.
Corpus select(const Corpus& c, const std::vector<std::string>& ids) {
  Corpus out;
  out.name = c.name;
  for (const auto& id : ids) {
    const auto* d = c.find(id);
    if (!d) throw IoError("manifest document " + id + " not found in " + c.name);
    out.documents.push_back(*d);
  }
  return out;
}

int cmd_eval(const Options& o) {
  auto gold = read_corpus(o.gold, o.jobs);
  auto pred = read_corpus(o.pred, o.jobs);
  if (!o.manifest.empty()) {
    const auto m = SplitManifest::from_json(read_json(o.manifest));
    gold = select(gold, m.test_ids);
    pred = select(pred, m.test_ids);
  }
  return run_scoring(o, gold, pred);
}

int cmd_iaa(const Options& o) {
  return run_scoring(o, read_corpus(o.a, o.jobs), read_corpus(o.b, o.jobs));
}

int cmd_gazetteer_build(const Options& o) {
  std::vector<VocabEntry> entries;
  for (const auto& spec : o.sources) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--source expects kind=path, got " + spec);
    const auto kind = parse_source_kind(spec.substr(0, eq));
    if (!kind) throw UsageError("unknown source kind in " + spec);
    auto got = ingest(*kind, read_file(spec.substr(eq + 1)));
    entries.insert(entries.end(), got.begin(), got.end());
  }
  GazetteerOptions gopts;
  gopts.min_length = o.min_length;
  gopts.drop_numeric = !o.keep_numeric;
  gopts.drop_common_words = !o.keep_common;
  if (!o.common_words.empty()) {
    for (auto w : detail::dump_lines(read_file(o.common_words))) {
      w = detail::trim(w);
      if (!w.empty() && w.front() != '#') gopts.common_words.insert(fold_case(w));
    }
  }
  const auto gaz = build_gazetteer(entries, gopts);
  emit(o.out, gaz.to_json().dump(2) + "\n");
  std::cerr << entries.size() << " names, " << gaz.entries.size() << " gazetteer entries, "
            << gaz.normalization.filtered_keys() << " filtered\n";
  return kExitOk;
}

int cmd_gazetteer_export(const Options& o) {
  emit(o.out, render_vocab(load_gazetteer(o.gazetteer), o.subwords));
  return kExitOk;
}

std::string to_jsonl(const Corpus& c) {
  std::string out;
  for (const auto& d : c.documents) {
    if (d.entities.empty()) out += nlohmann::ordered_json{{"doc_id", d.doc_id}}.dump() + "\n";
    for (const auto& e : d.entities) {
      nlohmann::ordered_json j;
      j["doc_id"] = d.doc_id;
      j["label"] = e.label.base;
      if (e.label.qualifier) j["qualifier"] = *e.label.qualifier;
      if (e.fragments.size() == 1) {
        j["start"] = e.fragments[0].start;
        j["end"] = e.fragments[0].end;
      } else {
        auto frags = nlohmann::ordered_json::array();
        for (const auto& f : e.fragments) frags.push_back({f.start, f.end});
        j["fragments"] = std::move(frags);
      }
      j["surface"] = e.surface;
      out += j.dump() + "\n";
    }
  }
  return out;
}

int cmd_tag(const Options& o) {
  const Tagger tagger(load_gazetteer(o.gazetteer), load_rules(o.rules));
  if (!o.text.empty()) {
    Document d;
    d.doc_id = fs::path(o.text).stem().string();
    d.text = read_file(o.text);
    d.entities = tagger.tag(d.text);
    emit(o.out, serialize_standoff(d).ann);
    return kExitOk;
  }
  if (o.corpus.empty()) throw UsageError("tag needs --corpus or --text");
  const auto tagged = silver_annotate(read_corpus(o.corpus, o.jobs), tagger_predictor(tagger), o.jobs);
  if (!o.out.empty()) write_corpus(tagged, o.out);
  if (!o.jsonl.empty()) emit(o.jsonl, to_jsonl(tagged));
  if (o.out.empty() && o.jsonl.empty()) std::cout << to_jsonl(tagged);
  return kExitOk;
}

int cmd_silver(const Options& o) {
  const auto corpus = read_corpus(o.corpus, o.jobs);
  Corpus silver;
  const int chosen = !o.gazetteer.empty() + !o.predictions.empty() + !o.predictions_jsonl.empty();
  if (chosen != 1) {
    throw UsageError("silver needs exactly one of --gazetteer, --predictions, --predictions-jsonl");
  }
  if (!o.gazetteer.empty()) {
    const Tagger tagger(load_gazetteer(o.gazetteer), load_rules(o.rules));
    silver = silver_annotate(corpus, tagger_predictor(tagger), o.jobs);
  } else {
    const auto external =
        !o.predictions.empty()
            ? ExternalPredictions::from_corpus(read_corpus(o.predictions, o.jobs))
            : ExternalPredictions::from_jsonl(read_file(o.predictions_jsonl), corpus);
    silver = silver_annotate(corpus, external, o.jobs);
  }
  write_corpus(silver, o.out);
  std::cerr << silver.documents.size() << " silver documents, " << silver.entity_count()
            << " entities\n";
  return kExitOk;
}

int cmd_fuse(const Options& o) {
  FusionConfig config;
  config.prefix_collisions = !o.no_prefix;
  if (!o.converted_dirs.empty() && !o.silver_dirs.empty()) {
    throw UsageError("fuse takes either --converted or --silver sources, not both");
  }
  config.mode = o.silver_dirs.empty() ? FusionMode::converted_only : FusionMode::silver;
  for (const auto& d : o.gold_dirs) config.sources.push_back({read_corpus(d, o.jobs), Provenance::gold});
  for (const auto& d : o.converted_dirs) {
    config.sources.push_back({read_corpus(d, o.jobs), Provenance::converted});
  }
  for (const auto& d : o.silver_dirs) {
    config.sources.push_back({read_corpus(d, o.jobs), Provenance::silver});
  }
  const auto result = fuse(config);
  write_corpus(result.corpus, o.out);
  nlohmann::ordered_json j;
  j["documents"] = result.corpus.documents.size();
  j["provenance"] = result.provenance_counts;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_report(const Options& o) {
  std::vector<RunResult> runs;
  for (const auto& path : o.runs) runs.push_back(RunResult::from_json(read_json(path)));
  AggregateOptions aopts;
  aopts.label_filter = parse_focus(o.focus);
  aopts.per_split = o.per_split;
  aopts.averaging = o.macro ? Averaging::macro : Averaging::micro;
  const auto table = aggregate(runs, aopts);
  const auto layout = parse_layout(o.layout);
  if (!layout) throw UsageError("--layout must be text, markdown or csv");
  emit(o.out, render_table(table, *layout));
  if (!o.json_out.empty()) write_file_atomic(o.json_out, table.to_json().dump(2) + "\n");
  return kExitOk;
}

int cmd_defaults(const Options& o) {
  if (o.what == "rules") {
    emit(o.out, RuleSet::defaults().to_json().dump(2) + "\n");
  } else if (o.what == "mapping") {
    emit(o.out, default_softcite_table().to_json().dump(2) + "\n");
  } else {
    std::string s;
    for (const auto& w : builtin_common_words()) s += w + "\n";
    emit(o.out, s);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wfner: standoff corpus tooling, evaluation and baselines for workflow NER"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Options o;
  int status = kExitOk;
  std::function<int()> action;

  app.add_option("--jobs", o.jobs, "Worker threads for per-document work")
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--config", "JSON file of default flag values (explicit flags win)");

  auto mode_opt = [&](CLI::App* c) {
    c->add_option("--mode", o.mode, "strict, relaxed or both")
        ->check(CLI::IsMember({"strict", "relaxed", "both"}));
    c->add_option("--focus", o.focus, "Comma-separated labels for the Overall-focused row");
    c->add_flag("--qualifiers", o.qualifiers, "Require equal qualifiers when matching");
    c->add_flag("--macro", o.macro, "Macro-average the overall row");
    c->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    c->add_option("--out", o.out, "Output file (default stdout)");
    c->add_option("--diff", o.diff, "Write missed/spurious entity listing here");
    c->add_option("--run-out", o.run_out, "Also write a RunResult JSON (single mode)");
    c->add_option("--split-id", o.split_id, "Split id recorded in the RunResult");
    c->add_option("--seed-model", o.seed_model, "Model seed recorded in the RunResult");
    c->add_option("--meta", o.meta, "JSON file stored as RunResult metadata");
  };

  auto* validate = app.add_subcommand("validate", "Check corpus invariants");
  validate->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingDirectory);
  validate->add_flag("--schema", o.schema_check, "Also require registered labels");
  validate->add_option("--out", o.out);
  validate->callback([&] { action = [&] { return cmd_validate(o); }; });

  auto* stats = app.add_subcommand("stats", "Label counts, token counts, nesting fraction");
  stats->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingDirectory);
  stats->add_option("--out", o.out);
  stats->callback([&] { action = [&] { return cmd_stats(o); }; });

  auto* convert = app.add_subcommand("convert", "Map a SoftCite-style corpus to the workflow schema");
  convert->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingDirectory);
  convert->add_option("--out", o.out)->required();
  convert->add_option("--table", o.table, "Mapping table JSON (default: built-in)");
  convert->add_flag("--strict", o.strict, "Fail on source labels without a rule");
  convert->add_option("--report", o.report_out, "ConversionReport JSON (default stdout)");
  convert->callback([&] { action = [&] { return cmd_convert(o); }; });

  auto* split = app.add_subcommand("split", "Write reproducible train/dev/test manifests");
  split->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingDirectory);
  split->add_option("--n", o.n_splits, "Number of splits")->check(CLI::PositiveNumber);
  split->add_option("--seed", o.seed, "Base seed");
  split->add_option("--train-frac", o.train_frac, "Train+dev share")->check(CLI::Range(0.0, 1.0));
  split->add_option("--dev-frac", o.dev_frac, "Dev share of train+dev")->check(CLI::Range(0.0, 1.0));
  split->add_option("--out", o.out)->required();
  split->callback([&] { action = [&] { return cmd_split(o); }; });

  auto* eval = app.add_subcommand("eval", "Score predictions against gold");
  eval->add_option("--gold", o.gold)->required()->check(CLI::ExistingDirectory);
  eval->add_option("--pred", o.pred)->required()->check(CLI::ExistingDirectory);
  eval->add_option("--manifest", o.manifest, "Score only the manifest's test documents")
      ->check(CLI::ExistingFile);
  mode_opt(eval);
  eval->callback([&] { action = [&] { return cmd_eval(o); }; });

  auto* agreement = app.add_subcommand("iaa", "Inter-annotator agreement between two annotation sets");
  agreement->add_option("--a", o.a)->required()->check(CLI::ExistingDirectory);
  agreement->add_option("--b", o.b)->required()->check(CLI::ExistingDirectory);
  mode_opt(agreement);
  agreement->callback([&] { action = [&] { return cmd_iaa(o); }; });

  auto* gaz = app.add_subcommand("gazetteer", "Build or export the tool-name gazetteer");
  gaz->require_subcommand(1);
  auto* build = gaz->add_subcommand("build", "Aggregate knowledge-base dumps");
  build->add_option("--source", o.sources, "kind=path; kinds: biotools bioconda biocontainers bioweb custom")
      ->required();
  build->add_option("--out", o.out);
  build->add_option("--min-length", o.min_length);
  build->add_flag("--keep-numeric", o.keep_numeric);
  build->add_flag("--keep-common-words", o.keep_common);
  build->add_option("--common-words", o.common_words, "Replacement common-word list")
      ->check(CLI::ExistingFile);
  build->callback([&] { action = [&] { return cmd_gazetteer_build(o); }; });
  auto* exp = gaz->add_subcommand("export", "Write the vocabulary file");
  exp->add_option("--gazetteer", o.gazetteer)->required()->check(CLI::ExistingFile);
  exp->add_option("--out", o.out);
  exp->add_flag("--subwords", o.subwords, "Split multi-word names into words");
  exp->callback([&] { action = [&] { return cmd_gazetteer_export(o); }; });

  auto* tag_cmd = app.add_subcommand("tag", "Dictionary/rule tagging");
  tag_cmd->add_option("--gazetteer", o.gazetteer)->required()->check(CLI::ExistingFile);
  tag_cmd->add_option("--rules", o.rules)->check(CLI::ExistingFile);
  tag_cmd->add_option("--corpus", o.corpus)->check(CLI::ExistingDirectory);
  tag_cmd->add_option("--text", o.text, "Tag one text file, print .ann")->check(CLI::ExistingFile);
  tag_cmd->add_option("--out", o.out);
  tag_cmd->add_option("--jsonl", o.jsonl, "Also write predictions as JSONL");
  tag_cmd->callback([&] { action = [&] { return cmd_tag(o); }; });

  auto* silver = app.add_subcommand("silver", "Replace annotations with predictions (silver corpus)");
  silver->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingDirectory);
  silver->add_option("--out", o.out)->required();
  silver->add_option("--gazetteer", o.gazetteer)->check(CLI::ExistingFile);
  silver->add_option("--rules", o.rules)->check(CLI::ExistingFile);
  silver->add_option("--predictions", o.predictions, "Directory of <doc_id>.ann predictions")
      ->check(CLI::ExistingDirectory);
  silver->add_option("--predictions-jsonl", o.predictions_jsonl)->check(CLI::ExistingFile);
  silver->callback([&] { action = [&] { return cmd_silver(o); }; });

  auto* fuse_cmd = app.add_subcommand("fuse", "Merge gold with converted or silver corpora");
  fuse_cmd->add_option("--gold", o.gold_dirs)->required()->check(CLI::ExistingDirectory);
  fuse_cmd->add_option("--converted", o.converted_dirs)->check(CLI::ExistingDirectory);
  fuse_cmd->add_option("--silver", o.silver_dirs)->check(CLI::ExistingDirectory);
  fuse_cmd->add_option("--out", o.out)->required();
  fuse_cmd->add_flag("--no-prefix", o.no_prefix, "Fail on doc_id collisions instead of prefixing");
  fuse_cmd->callback([&] { action = [&] { return cmd_fuse(o); }; });

  auto* report = app.add_subcommand("report", "Aggregate RunResults into a mean ±std table");
  report->add_option("runs", o.runs, "RunResult JSON files")->required()->check(CLI::ExistingFile);
  report->add_option("--focus", o.focus);
  report->add_option("--layout", o.layout)->check(CLI::IsMember({"text", "markdown", "md", "csv"}));
  report->add_flag("--per-split", o.per_split, "Std over per-split means");
  report->add_flag("--macro", o.macro);
  report->add_option("--out", o.out);
  report->add_option("--json", o.json_out, "Also write the table as JSON");
  report->callback([&] { action = [&] { return cmd_report(o); }; });

  auto* defaults = app.add_subcommand("defaults", "Print a built-in data file");
  defaults->add_option("what", o.what)->required()->check(
      CLI::IsMember({"rules", "mapping", "common-words"}));
  defaults->add_option("--out", o.out);
  defaults->callback([&] { action = [&] { return cmd_defaults(o); }; });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  try {
    status = action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return status;
}
