// Copyright 2026 The FormGraph Authors.
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

// formgraph: command-line front end.
//
// Exit codes: 0 success, 1 a check did not pass (gradcheck), 2 usage or
// validation error (bad flags, bad weights), 3 data error (unreadable or
// malformed input documents).

#include <CLI11.hpp>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <thread>

#include "formgraph/corpus.hpp"
#include "formgraph/error.hpp"
#include "formgraph/gradcheck.hpp"
#include "formgraph/log.hpp"
#include "formgraph/metrics.hpp"
#include "formgraph/oracle.hpp"
#include "formgraph/pipeline.hpp"
#include "formgraph/supervision.hpp"
#include "formgraph/trainer.hpp"

namespace fs = std::filesystem;
using namespace formgraph;

namespace {

using ojson = nlohmann::ordered_json;

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first error.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<EditThresholds> parse_thresholds(const std::string& text) {
  std::vector<EditThresholds> out;
  std::stringstream stages(text);
  std::string stage;
  while (std::getline(stages, stage, '/')) {
    EditThresholds t{};
    char c1 = 0, c2 = 0;
    std::stringstream in(stage);
    if (!(in >> t.merge >> c1 >> t.group >> c2 >> t.prune) || c1 != ',' || c2 != ',' || !(in >> std::ws).eof()) {
      throw UsageError("thresholds must look like m,g,p/m,g,p/m,g,p");
    }
    out.push_back(t);
  }
  return out;
}

std::string output_stem(const Document& doc, const fs::path& source) {
  std::string s = doc.name.empty() ? source.stem().string() : doc.name;
  for (char& c : s) {
    if (c == '/' || c == '\\') c = '_';
  }
  return s;
}

ModelConfig config_for(const std::string& classes, int feature_size) {
  ModelConfig c;
  if (classes == "funsd") {
    c.num_classes = ClassSet::funsd().size();
  } else if (classes == "naf") {
    c.num_classes = ClassSet::naf().size();
  } else {
    throw UsageError("--classes must be funsd or naf");
  }
  c.feature_size = c.visual_size = c.proposal_hidden = feature_size;
  c.validate();
  return c;
}

gnn::Model<float> load_model(const fs::path& path) {
  if (!fs::exists(path)) throw WeightsError("weights file '" + path.string() + "' does not exist");
  const ModelWeights w = read_weights(path);
  return gnn::Model<float>::from_weights(w, infer_config(w));
}

struct Provider {
  std::string kind = "stub";
  std::string url;

  std::unique_ptr<VisualFeatureProvider> make(const Document& doc, int size) const {
    if (kind == "stub") return std::make_unique<StubProvider>(size);
    if (kind == "oracle") return std::make_unique<OracleProvider>(doc, size);
    if (kind == "http") return std::make_unique<HttpProvider>(url, size);
    throw UsageError("--provider must be stub, oracle or http");
  }
};

void print(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

// ---- subcommands -----------------------------------------------------------

struct SynthArgs {
  std::uint64_t seed = 0;
  int count = 1;
  SynthParams params;
  std::string out = "-";
};

int run_synth(const SynthArgs& a) {
  if (a.count < 1) throw UsageError("--count must be >= 1");
  if (a.count == 1) {
    print(document_to_json(synth_form(a.seed, a.params)), a.out);
    return 0;
  }
  if (a.out == "-") throw UsageError("--out must name a directory when --count > 1");
  fs::create_directories(a.out);
  for (int i = 0; i < a.count; ++i) {
    const Document d = synth_form(a.seed + static_cast<std::uint64_t>(i), a.params);
    save_document(d, fs::path(a.out) / (d.name + ".json"));
  }
  return 0;
}

struct ProposeArgs {
  std::string doc, weights, out = "-";
};

int run_propose(const ProposeArgs& a) {
  const auto model = load_model(a.weights);
  const Document doc = load_any_document(a.doc);
  const ProposalMlp<float> mlp{model.proposal_fc1, model.proposal_fc2};
  const auto lines = confident_lines(doc.lines);
  const auto scored = score_pairs(doc, lines, mlp);
  ojson j;
  j["document"] = doc.name;
  j["lines"] = lines.size();
  j["candidates"] = scored.size();
  j["edges"] = ojson::array();
  for (const auto& e : select_edges(scored)) j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"score", e.score}});
  print(j.dump(1) + "\n", a.out);
  return 0;
}

struct InferArgs {
  std::vector<std::string> docs;
  std::string weights, out_dir, thresholds;
  Provider provider;
  bool hit_at_1 = false;
  bool svg = true;
  int jobs = 1;
};

int run_infer(const InferArgs& a) {
  const auto model = load_model(a.weights);
  PipelineOptions options;
  if (!a.thresholds.empty()) options.thresholds = parse_thresholds(a.thresholds);
  options.force_gt_grouping = a.hit_at_1;

  std::vector<Document> docs(a.docs.size());
  parallel_for(docs.size(), a.jobs, [&](std::size_t i) { docs[i] = load_any_document(a.docs[i]); });
  std::vector<std::string> results(docs.size()), svgs(docs.size());
  parallel_for(docs.size(), a.jobs, [&](std::size_t i) {
    auto provider = a.provider.make(docs[i], model.config.visual_size);
    const auto out = run_pipeline(docs[i], model, *provider, options);
    results[i] = result_to_json(out.graph, docs[i].class_set, out.result.hit_scores ? &*out.result.hit_scores : nullptr);
    if (a.svg) svgs[i] = render_svg(out.graph, docs[i].class_set, &docs[i]);
  });
  // Nothing is written until every document has gone through.
  fs::create_directories(a.out_dir);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::string stem = output_stem(docs[i], a.docs[i]);
    write_text_file(fs::path(a.out_dir) / (stem + ".result.json"), results[i]);
    if (a.svg) write_text_file(fs::path(a.out_dir) / (stem + ".svg"), svgs[i]);
  }
  return 0;
}

struct AlignArgs {
  std::string doc, weights, out = "-";
};

int run_align(const AlignArgs& a) {
  const Document doc = load_any_document(a.doc);
  const auto lines = confident_lines(doc.lines);
  const auto assignment = assign_lines(lines, doc.gt_lines);
  const auto pairs = proposal_labels(lines, assignment, doc);
  if (a.weights.empty()) {
    print(labels_to_json(doc, lines, assignment, pairs, nullptr, nullptr), a.out);
    return 0;
  }
  const auto model = load_model(a.weights);
  const ProposalMlp<float> mlp{model.proposal_fc1, model.proposal_fc2};
  const FormGraph graph = init_graph(doc, lines, select_edges(score_pairs(doc, lines, mlp)));
  const EdgeLabels labels = derive_labels(graph, assignment, doc);
  print(labels_to_json(doc, lines, assignment, pairs, &graph, &labels), a.out);
  return 0;
}

struct EvalArgs {
  std::vector<std::string> gt, pred;
  bool per_document = false, key_value = false, text = false;
  std::string out = "-";
  int jobs = 1;
};

int run_eval(const EvalArgs& a) {
  if (a.gt.size() != a.pred.size()) throw UsageError("--gt and --pred need the same number of files");
  std::vector<Document> gt(a.gt.size());
  std::vector<GraphResult> pred(a.pred.size());
  parallel_for(gt.size(), a.jobs, [&](std::size_t i) {
    gt[i] = load_any_document(a.gt[i]);
    pred[i] = result_from_json(read_text_file(a.pred[i]), gt[i].class_set);
  });
  const EvalReport r = evaluate_corpus(pred, gt, {a.per_document, a.key_value});
  print(a.text ? report_to_text(r) : report_to_json(r), a.out);
  return 0;
}

struct GradcheckArgs {
  std::string function = "proposal";
  GradcheckOptions options;
  double tolerance = 0;  // 0 = per-function default
};

int run_gradcheck(const GradcheckArgs& a) {
  const GradcheckFunction f = parse_gradcheck_function(a.function);
  const double tol = a.tolerance > 0 ? a.tolerance : (f == GradcheckFunction::kLinear ? 1e-8 : 1e-4);
  const GradcheckReport r = finite_diff_gradcheck(f, a.options);
  ojson j;
  j["function"] = gradcheck_function_name(f);
  j["draws"] = r.draws;
  j["checked"] = r.checked;
  j["skipped_kinks"] = r.skipped_kinks;
  j["max_rel_error"] = r.max_rel_error;
  j["tolerance"] = tol;
  j["pass"] = r.max_rel_error < tol;
  std::cout << j.dump(1) << "\n";
  return r.max_rel_error < tol ? 0 : 1;
}

struct TrainArgs {
  std::uint64_t corpus_seed = 1;
  int docs = 200;
  int eval_docs = 50;
  TrainOptions options;
  std::string base, out;
};

int run_train(const TrainArgs& a) {
  if (a.docs < 1) throw UsageError("--docs must be >= 1");
  const auto train = synth_corpus(a.corpus_seed, a.docs);
  const TrainResult r = train_proposal_mlp(train, a.options);
  ojson j;
  j["initial_loss"] = r.initial_loss;
  j["final_loss"] = r.final_loss;
  if (a.eval_docs > 0) {
    const auto held_out = synth_corpus(a.corpus_seed + 0x5EED, a.eval_docs);
    const auto ev = evaluate_proposal(r.mlp, held_out);
    j["held_out"] = {{"documents", a.eval_docs},
                     {"pairs", ev.pairs},
                     {"accuracy", ev.accuracy},
                     {"selection_recall", ev.selection_recall}};
  }
  if (!a.out.empty()) {
    ModelConfig config;
    config.proposal_hidden = a.options.hidden;
    ModelWeights w = a.base.empty() ? ModelWeights::random(config, a.options.seed) : read_weights(a.base);
    store_proposal(w, r.mlp);
    w.check_manifest(infer_config(w));
    save_weights(w, a.out);
  }
  std::cout << j.dump(1) << "\n";
  return 0;
}

struct WeightsArgs {
  std::string kind = "random";
  std::string classes = "funsd";
  int feature_size = kFeatureSize;
  std::uint64_t seed = 0;
  std::string out;
};

int run_weights_init(const WeightsArgs& a) {
  const ModelConfig c = config_for(a.classes, a.feature_size);
  ModelWeights w;
  if (a.kind == "random") {
    w = ModelWeights::random(c, a.seed);
  } else if (a.kind == "oracle") {
    w = make_oracle_weights(c);
  } else if (a.kind == "zeros") {
    w = ModelWeights::zeros(c);
  } else {
    throw UsageError("--kind must be random, oracle or zeros");
  }
  save_weights(w, a.out);
  return 0;
}

int run_weights_info(const std::string& path) {
  if (!fs::exists(path)) throw WeightsError("weights file '" + path + "' does not exist");
  const ModelWeights w = read_weights(path);
  const ModelConfig c = infer_config(w);
  w.check_manifest(c);
  ojson j;
  j["tensors"] = w.size();
  j["num_classes"] = c.num_classes;
  j["feature_size"] = c.feature_size;
  j["visual_size"] = c.visual_size;
  j["proposal_hidden"] = c.proposal_hidden;
  j["stage_depths"] = c.stage_depths;
  std::cout << j.dump(1) << "\n";
  return 0;
}

struct StatsArgs {
  std::string funsd, naf;
};

int run_stats(const StatsArgs& a) {
  if (a.funsd.empty() && a.naf.empty()) throw UsageError("give --funsd and/or --naf");
  ojson j;
  if (!a.funsd.empty()) j["funsd"] = corpus_counts(load_funsd_corpus(a.funsd));
  if (!a.naf.empty()) j["naf"] = corpus_counts(load_naf_corpus(a.naf));
  std::cout << j.dump(1) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  log::init_from_env();
  CLI::App app{"Form understanding by iterative graph editing"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic form documents");
  synth_cmd->add_option("--seed", synth.seed, "Seed (first seed when --count > 1)");
  synth_cmd->add_option("--rows", synth.params.rows, "Question/answer rows")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--cols", synth.params.cols, "Columns")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--multiline", synth.params.multiline_prob, "Probability of a two-line answer")
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--overseg", synth.params.overseg_prob, "Probability of splitting a line")
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--jitter", synth.params.jitter, "Class score noise")->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--count", synth.count, "Number of documents");
  synth_cmd->add_option("--out", synth.out, "Output file, or directory when --count > 1");

  ProposeArgs propose;
  auto* propose_cmd = app.add_subcommand("propose", "Score line pairs and print the selected edges");
  propose_cmd->add_option("--doc", propose.doc, "Document")->required();
  propose_cmd->add_option("--weights", propose.weights, "FGW1 weights")->required();
  propose_cmd->add_option("--out", propose.out, "Output file");

  InferArgs infer;
  auto* infer_cmd = app.add_subcommand("infer", "Run the full pipeline and write result JSON and SVG overlays");
  infer_cmd->add_option("docs", infer.docs, "Documents")->required();
  infer_cmd->add_option("--weights", infer.weights, "FGW1 weights")->required();
  infer_cmd->add_option("--out-dir", infer.out_dir, "Output directory")->required();
  infer_cmd->add_option("--provider", infer.provider.kind, "stub, oracle or http");
  infer_cmd->add_option("--provider-url", infer.provider.url, "Endpoint for --provider http");
  infer_cmd->add_option("--thresholds", infer.thresholds, "Edit thresholds m,g,p/m,g,p/m,g,p");
  infer_cmd->add_flag("--hit-at-1", infer.hit_at_1, "Force GT grouping in the first edit and record Hit@1 scores");
  infer_cmd->add_flag("!--no-svg", infer.svg, "Skip SVG overlays");
  infer_cmd->add_option("--jobs", infer.jobs, "Worker threads")->check(CLI::PositiveNumber);

  AlignArgs align;
  auto* align_cmd = app.add_subcommand("align", "Dump GT alignment and training labels");
  align_cmd->add_option("--doc", align.doc, "Document with ground truth")->required();
  align_cmd->add_option("--weights", align.weights, "Also label the proposed graph's edges and nodes");
  align_cmd->add_option("--out", align.out, "Output file");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score result files against ground truth");
  eval_cmd->add_option("--gt", eval.gt, "Ground-truth documents")->required();
  eval_cmd->add_option("--pred", eval.pred, "Result files, in the same order")->required();
  eval_cmd->add_flag("--per-document", eval.per_document, "Also report per-document averages");
  eval_cmd->add_flag("--key-value", eval.key_value, "Score only question-answer relationships");
  eval_cmd->add_flag("--text", eval.text, "Plain-text tables instead of JSON");
  eval_cmd->add_option("--out", eval.out, "Output file");
  eval_cmd->add_option("--jobs", eval.jobs, "Worker threads")->check(CLI::PositiveNumber);

  GradcheckArgs grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
  grad_cmd->add_option("--function", grad.function, "linear or proposal");
  grad_cmd->add_option("--draws", grad.options.draws, "Random parameter draws");
  grad_cmd->add_option("--coords", grad.options.coords_per_draw, "Coordinates per tensor per draw (0 = all)");
  grad_cmd->add_option("--eps", grad.options.eps, "Finite-difference step");
  grad_cmd->add_option("--seed", grad.options.seed, "Seed");
  grad_cmd->add_option("--hidden", grad.options.hidden, "Hidden width");
  grad_cmd->add_option("--tolerance", grad.tolerance, "Maximum relative error");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the edge-proposal scorer on a synthetic corpus");
  train_cmd->add_option("--corpus-seed", train.corpus_seed, "Seed of the synthetic corpus");
  train_cmd->add_option("--docs", train.docs, "Training documents");
  train_cmd->add_option("--eval-docs", train.eval_docs, "Held-out documents (0 to skip)");
  train_cmd->add_option("--steps", train.options.steps, "SGD steps");
  train_cmd->add_option("--lr", train.options.learning_rate, "Learning rate");
  train_cmd->add_option("--momentum", train.options.momentum, "Momentum");
  train_cmd->add_option("--batch", train.options.batch_size, "Minibatch size");
  train_cmd->add_option("--seed", train.options.seed, "Initialization and shuffling seed");
  train_cmd->add_option("--base", train.base, "Weights whose proposal tensors get replaced");
  train_cmd->add_option("--out", train.out, "Write full weights here");

  WeightsArgs winit;
  std::string info_path;
  auto* weights_cmd = app.add_subcommand("weights", "Create or inspect FGW1 weight files");
  weights_cmd->require_subcommand(1);
  auto* init_cmd = weights_cmd->add_subcommand("init", "Write a fresh weight file");
  init_cmd->add_option("--kind", winit.kind, "random, oracle or zeros");
  init_cmd->add_option("--classes", winit.classes, "funsd or naf");
  init_cmd->add_option("--feature-size", winit.feature_size, "GCN width")->check(CLI::PositiveNumber);
  init_cmd->add_option("--seed", winit.seed, "Seed for --kind random");
  init_cmd->add_option("--out", winit.out, "Output file")->required();
  auto* info_cmd = weights_cmd->add_subcommand("info", "Validate a weight file and print its configuration");
  info_cmd->add_option("path", info_path, "Weight file")->required();

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Load dataset splits and print document counts");
  stats_cmd->add_option("--funsd", stats.funsd, "FUNSD root");
  stats_cmd->add_option("--naf", stats.naf, "NAF root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string stage = "formgraph";
  try {
    if (*synth_cmd) return stage = "synth", run_synth(synth);
    if (*propose_cmd) return stage = "propose", run_propose(propose);
    if (*infer_cmd) return stage = "infer", run_infer(infer);
    if (*align_cmd) return stage = "align", run_align(align);
    if (*eval_cmd) return stage = "eval", run_eval(eval);
    if (*grad_cmd) return stage = "gradcheck", run_gradcheck(grad);
    if (*train_cmd) return stage = "train", run_train(train);
    if (*init_cmd) return stage = "weights init", run_weights_init(winit);
    if (*info_cmd) return stage = "weights info", run_weights_info(info_path);
    if (*stats_cmd) return stage = "stats", run_stats(stats);
  } catch (const UsageError& e) {
    std::cerr << stage << ": error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << stage << ": data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << stage << ": failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
