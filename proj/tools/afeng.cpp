#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "afeng/baselines.hpp"
#include "afeng/bml.hpp"
#include "afeng/corpus.hpp"
#include "afeng/embeddings.hpp"
#include "afeng/eval.hpp"
#include "afeng/hash.hpp"
#include "afeng/http.hpp"
#include "afeng/nn/checkpoint.hpp"
#include "afeng/pipeline.hpp"
#include "afeng/service.hpp"

namespace fs = std::filesystem;
using namespace afeng;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Raised for bad input data; mapped to exit status 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path home_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("AFENG_HOME"); env && *env) return env;
  return ".afeng";
}

fs::path model_dir_or_default(const std::string& flag, const fs::path& home) {
  return flag.empty() ? home / "model" : fs::path(flag);
}

corpus::Format format_for(const fs::path& p) {
  auto ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".csv" ? corpus::Format::Csv : corpus::Format::Tsv;
}

corpus::Corpus load(const fs::path& p) {
  if (!fs::exists(p)) throw DataError("no such file: " + p.string());
  return corpus::load_corpus(p, format_for(p));
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
  if (!out) throw DataError("cannot write " + p.string());
}

void print_counts(const char* what, const corpus::Corpus& c) {
  std::cout << what << ": " << c.size() << " rows";
  const auto counts = corpus::class_counts(c);
  for (Emotion e : kAllEmotions) std::cout << ' ' << name_of(e) << '=' << counts[index_of(e)];
  std::cout << '\n';
}

pipeline::Classifier load_classifier(const fs::path& dir) {
  if (!fs::exists(dir / "model.ckpt")) {
    throw DataError("no model.ckpt in " + dir.string() + " (run 'afeng train' first)");
  }
  return pipeline::load_model_dir(dir);
}

// --- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::size_t per_class = 0;
  double test_fraction = 0.2;
  double validation_fraction = 0.02;
  std::uint64_t seed = 42;
  bool no_balance = false;
};

int run_ingest(const IngestArgs& a) {
  std::vector<corpus::Corpus> sources;
  for (const auto& in : a.inputs) {
    sources.push_back(load(in));
    std::cout << in << ": " << sources.back().size() << " rows\n";
  }
  auto all = a.no_balance
                 ? corpus::consolidate(sources)
                 : corpus::consolidate_and_balance(
                       sources, a.per_class ? std::optional(a.per_class) : std::nullopt, a.seed);
  print_counts("consolidated", all);
  const auto sp = corpus::split(all, a.seed, a.test_fraction, a.validation_fraction);
  print_counts("train", sp.train);
  print_counts("validation", sp.validation);
  print_counts("test", sp.test);
  if (!a.out_dir.empty()) {
    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    corpus::save_corpus(dir / "consolidated.tsv", all);
    corpus::save_corpus(dir / "train.tsv", sp.train);
    corpus::save_corpus(dir / "validation.tsv", sp.validation);
    corpus::save_corpus(dir / "test.tsv", sp.test);
    std::cout << "wrote " << dir.string() << "/{consolidated,train,validation,test}.tsv\n";
  }
  return kExitOk;
}

// --- synth ----------------------------------------------------------------

int run_synth(std::size_t per_class, std::uint64_t seed, const std::string& out) {
  const auto c = corpus::synthetic_corpus(per_class, seed);
  if (out.empty() || out == "-") {
    corpus::write_corpus(std::cout, c);
  } else {
    corpus::save_corpus(out, c);
    std::cout << "wrote " << c.size() << " rows to " << out << '\n';
  }
  return kExitOk;
}

// --- train ----------------------------------------------------------------

struct TrainArgs {
  std::string train;
  std::string validation;
  std::string model_dir;
  std::string home;
  std::string vectors;
  pipeline::PipelineConfig cfg;
  std::string layer_order = "cnn-lstm";
  bool keep_stopwords = false;
  bool no_stem = false;
  bool quiet = false;
};

int run_train(TrainArgs a) {
  auto& cfg = a.cfg;
  cfg.model.order = nn::layer_order_from_string(a.layer_order);
  cfg.prep.remove_stopwords = !a.keep_stopwords;
  cfg.prep.stem = !a.no_stem;

  corpus::CorpusSplit sp;
  sp.train = load(a.train);
  if (!a.validation.empty()) sp.validation = load(a.validation);
  sp.seed = cfg.train.seed;
  if (sp.train.empty()) throw DataError("training file is empty: " + a.train);

  std::optional<embed::ParseResult> vectors;
  if (!a.vectors.empty()) {
    const auto prep = cfg.prep;
    std::set<std::string> wanted;
    for (const auto& doc : pipeline::preprocess_all(sp.train, prep)) wanted.insert(doc.begin(), doc.end());
    embed::ParseOptions opts;
    opts.expected_dim = cfg.model.embedding_dim;
    opts.key = [prep](const std::string& tok) {
      const auto n = text::normalize(text::tokenize(tok), false, prep.stem);
      return n.size() == 1 ? n.front() : std::string();
    };
    opts.keep = [&wanted](const std::string& key) { return wanted.contains(key); };
    vectors = embed::parse_vectors_file(a.vectors, opts);
    std::cout << "vectors: " << vectors->parsed << " lines parsed, " << vectors->vectors.size()
              << " vocabulary hits\n";
  }

  if (!a.quiet) {
    cfg.train.on_epoch = [total = cfg.train.epochs](const nn::EpochStats& s) {
      std::printf("epoch %zu/%zu loss %.6f val_acc %.4f\n", s.epoch, total, s.loss, s.val_accuracy);
      std::fflush(stdout);
    };
  }
  const auto out = pipeline::train_classifier(sp, cfg, vectors ? &vectors->vectors : nullptr);
  const auto dir = model_dir_or_default(a.model_dir, home_dir(a.home));
  pipeline::save_model_dir(dir, out.classifier, out.history);
  std::cout << "saved model to " << dir.string() << " (vocabulary " << out.classifier.vocab.size()
            << ", checkpoint "
            << hex64(nn::checkpoint_fingerprint(out.classifier.model, out.classifier.meta))
            << ")\n";
  return kExitOk;
}

// --- evaluate -------------------------------------------------------------

std::vector<std::pair<Emotion, Emotion>> read_prediction_pairs(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot read " + p.string());
  std::vector<std::pair<Emotion, Emotion>> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(p.string() + ": row " + std::to_string(row + 1) + " needs true<TAB>predicted");
    }
    const auto t = line.substr(0, tab), q = line.substr(tab + 1);
    if (row == 0 && !parse_emotion(t) && !parse_emotion(q)) {  // header
      ++row;
      continue;
    }
    ++row;
    const auto te = parse_emotion(t), pe = parse_emotion(q);
    if (!te || !pe) {
      throw DataError(p.string() + ": row " + std::to_string(row) + ": unknown label '" +
                      (te ? q : t) + "'");
    }
    out.emplace_back(*te, *pe);
  }
  return out;
}

int run_evaluate(const std::string& model_dir, const std::string& home, const std::string& data,
                 const std::string& predictions, const std::string& out_dir) {
  eval::ConfusionMatrix cm;
  if (!predictions.empty()) {
    std::vector<Emotion> t, p;
    for (const auto& [a, b] : read_prediction_pairs(predictions)) {
      t.push_back(a);
      p.push_back(b);
    }
    cm = eval::confusion(t, p);
  } else {
    if (data.empty()) throw CLI::ValidationError("evaluate", "either --data or --predictions is required");
    const auto clf = load_classifier(model_dir_or_default(model_dir, home_dir(home)));
    const auto rows = load(data);
    if (rows.empty()) throw DataError("evaluation file is empty: " + data);
    cm = pipeline::evaluate(clf, rows).confusion;
  }
  const auto rep = eval::report(cm);
  std::cout << eval::format_report(rep);
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / "report.csv", eval::report_csv(rep));
    write_file(fs::path(out_dir) / "confusion.csv", eval::confusion_csv(cm));
    write_file(fs::path(out_dir) / "report.txt", eval::format_report(rep));
  }
  return kExitOk;
}

// --- compare --------------------------------------------------------------

int run_compare(const std::string& train, const std::string& test, const std::string& model_dir,
                const std::string& out_dir, std::uint64_t seed) {
  const auto tr = load(train), te = load(test);
  if (tr.empty() || te.empty()) throw DataError("train and test files must be non-empty");
  std::optional<pipeline::Classifier> clf;
  if (!model_dir.empty()) clf = load_classifier(model_dir);
  const auto prep = clf ? clf->prep : text::PrepOptions{};

  baselines::ComparisonConfig cc;
  cc.sgd.seed = cc.svc.seed = cc.mlp.seed = seed;
  const auto grid = baselines::default_grid();
  auto rows = baselines::run_comparison(pipeline::labeled_tokens(tr, prep),
                                        pipeline::labeled_tokens(te, prep), grid, cc);
  if (clf) rows.push_back(pipeline::comparison_row(*clf, te));
  std::cout << baselines::format_comparison(rows);
  if (!out_dir.empty()) write_file(fs::path(out_dir) / "comparison.csv", baselines::comparison_csv(rows));
  return kExitOk;
}

// --- predict / export-bml / interact / serve ------------------------------

int run_predict(const std::string& model_dir, const std::string& home, const std::string& sentence) {
  const auto clf = load_classifier(model_dir_or_default(model_dir, home_dir(home)));
  const auto resp = service::respond(sentence, clf.distribution(sentence), 0, service::system_clock_ms());
  std::cout << service::to_json(resp).dump(2) << '\n';
  return kExitOk;
}

int run_export_bml(const std::string& model_dir, const std::string& home, const std::string& sentence,
                   const std::string& emotion, double intensity, const std::string& out,
                   const std::string& doc_id) {
  affect::EmotionDistribution dist;
  if (!emotion.empty()) {
    const auto e = parse_emotion(emotion);
    if (!e) throw CLI::ValidationError("--emotion", "unknown emotion '" + emotion + "'");
    dist = affect::EmotionDistribution::peaked(*e);
  } else {
    if (sentence.empty()) throw CLI::ValidationError("export-bml", "give a sentence or --emotion");
    dist = load_classifier(model_dir_or_default(model_dir, home_dir(home))).distribution(sentence);
  }
  auto appraisal = affect::appraise(dist);
  if (!emotion.empty()) {
    if (!(intensity > 0.0 && intensity <= 1.0)) throw DataError("--intensity must be in (0, 1]");
    appraisal.intensity = intensity;
  }
  const auto doc = bml::compose(appraisal, affect::derive_behaviors(appraisal.dominant), doc_id);
  const auto xml = bml::serialize(doc);
  if (out.empty() || out == "-") {
    std::cout << xml;
  } else {
    write_file(out, xml);
    std::cout << "wrote " << out << '\n';
  }
  return kExitOk;
}

std::unique_ptr<service::Engine> make_engine(const std::string& model_dir, const std::string& home, bool require_model,
                            double blend) {
  const auto h = home_dir(home);
  const auto dir = model_dir_or_default(model_dir, h);
  std::optional<pipeline::Classifier> clf;
  if (fs::exists(dir / "model.ckpt")) {
    clf = pipeline::load_model_dir(dir);
  } else if (require_model) {
    throw DataError("no model.ckpt in " + dir.string() + " (run 'afeng train' first)");
  } else {
    std::cerr << "warning: no model in " << dir.string() << "; /api/interact will answer 503\n";
  }
  service::EngineOptions opts;
  opts.blend_weight = blend;
  auto engine = std::make_unique<service::Engine>(std::move(clf), h / "memory" / "interactions.log", opts);
  for (const auto& w : engine->replay_warnings()) std::cerr << "warning: " << w << '\n';
  return engine;
}

int run_interact(const std::string& model_dir, const std::string& home, double blend) {
  auto engine = make_engine(model_dir, home, true, blend);
  std::cout << "Type a sentence (empty line or EOF to quit).\n";
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    if (line.empty()) break;
    try {
      const auto r = engine->interact(line);
      std::printf("#%llu %s (%.3f, %s) agent: %s\n  goal: %s | self: %s | other: %s\n",
                  static_cast<unsigned long long>(r.record_id),
                  std::string(name_of(r.appraisal.dominant)).c_str(), r.appraisal.intensity,
                  std::string(affect::to_string(r.appraisal.valence)).c_str(),
                  r.appraisal.agent_emotion.c_str(), r.behaviors.goal_behavior.c_str(),
                  r.behaviors.self_behavior.c_str(), r.behaviors.other_behavior.c_str());
    } catch (const service::ServiceError& e) {
      std::printf("%s: %s\n", e.code().c_str(), e.what());
    }
  }
  return kExitOk;
}

httplib::Server* g_server = nullptr;

int run_serve(const std::string& model_dir, const std::string& home, const std::string& host, int port,
              const std::string& ui_dir, double blend) {
  auto engine = make_engine(model_dir, home, false, blend);
  std::optional<fs::path> ui;
  if (!ui_dir.empty()) {
    if (!fs::is_directory(ui_dir)) throw DataError("--ui-dir is not a directory: " + ui_dir);
    ui = ui_dir;
  }
  auto srv = service::make_server(*engine, ui);
  g_server = srv.get();
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  int bound = port;
  if (port == 0) {
    bound = srv->bind_to_any_port(host);
  } else if (!srv->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw DataError("cannot bind " + host + ":" + std::to_string(port));
  std::cout << "listening on http://" << host << ':' << bound << std::endl;
  srv->listen_after_bind();
  g_server = nullptr;
  return kExitOk;
}

// --- pearson --------------------------------------------------------------

int run_pearson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::string line;
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char sep = line.find('\t') != std::string::npos ? '\t' : ',';
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, sep);) cells.push_back(c);
    if (row++ == 0) {
      names = cells;
      cols.resize(names.size());
      continue;
    }
    if (cells.size() != names.size()) {
      throw DataError(path + ": row " + std::to_string(row - 1) + " has " + std::to_string(cells.size()) +
                      " fields, expected " + std::to_string(names.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        std::size_t used = 0;
        cols[i].push_back(std::stod(cells[i], &used));
        if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
      } catch (const std::exception&) {
        throw DataError(path + ": row " + std::to_string(row - 1) + ": '" + cells[i] + "' is not a number");
      }
    }
  }
  if (names.size() < 2) throw DataError(path + ": need at least two numeric columns");
  std::printf("%-16s %-16s %10s %12s %6s\n", "x", "y", "r", "p", "n");
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i + 1; j < cols.size(); ++j) {
      const auto r = eval::pearson(cols[i], cols[j]);
      std::printf("%-16s %-16s %10.4f %12.4g %6zu\n", names[i].c_str(), names[j].c_str(), r.r, r.p, r.n);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion-oriented behavior engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "afeng 1.0");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate, consolidate, balance and split corpora");
  c_ingest->add_option("inputs", ingest.inputs, "Corpus files (.tsv or .csv)")->required();
  c_ingest->add_option("--out-dir", ingest.out_dir, "Write consolidated/train/validation/test TSVs here");
  c_ingest->add_option("--per-class", ingest.per_class, "Cap per emotion (default: smallest class)");
  c_ingest->add_flag("--no-balance", ingest.no_balance, "Keep every row instead of downsampling");
  c_ingest->add_option("--test-fraction", ingest.test_fraction)->capture_default_str();
  c_ingest->add_option("--validation-fraction", ingest.validation_fraction)->capture_default_str();
  c_ingest->add_option("--seed", ingest.seed)->capture_default_str();

  std::size_t synth_per_class = 20;
  std::uint64_t synth_seed = 42;
  std::string synth_out;
  auto* c_synth = app.add_subcommand("synth", "Write the deterministic synthetic keyword corpus");
  c_synth->add_option("--per-class", synth_per_class)->capture_default_str();
  c_synth->add_option("--seed", synth_seed)->capture_default_str();
  c_synth->add_option("-o,--out", synth_out, "Output TSV (default stdout)");

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train the CNN-LSTM classifier");
  c_train->add_option("--train", tr.train, "Training corpus")->required();
  c_train->add_option("--validation", tr.validation, "Validation corpus");
  c_train->add_option("--model-dir", tr.model_dir, "Output directory (default $AFENG_HOME/model)");
  c_train->add_option("--home", tr.home, "Data directory (overrides AFENG_HOME)");
  c_train->add_option("--vectors", tr.vectors, "GloVe-format vectors (.txt or .gz)");
  c_train->add_option("--epochs", tr.cfg.train.epochs)->capture_default_str();
  c_train->add_option("--batch-size", tr.cfg.train.batch_size)->capture_default_str()->check(CLI::PositiveNumber);
  c_train->add_option("--seed", tr.cfg.train.seed)->capture_default_str();
  c_train->add_option("--patience", tr.cfg.train.patience, "Early-stop patience (0 = off)")->capture_default_str();
  c_train->add_option("--dim", tr.cfg.model.embedding_dim)->capture_default_str()->check(CLI::PositiveNumber);
  c_train->add_option("--max-len", tr.cfg.model.max_len)->capture_default_str()->check(CLI::PositiveNumber);
  c_train->add_option("--kernel-widths", tr.cfg.model.kernel_widths)->capture_default_str()->delimiter(',');
  c_train->add_option("--filters", tr.cfg.model.filter_count)->capture_default_str()->check(CLI::PositiveNumber);
  c_train->add_option("--pool", tr.cfg.model.pool_size)->capture_default_str()->check(CLI::PositiveNumber);
  c_train->add_option("--hidden", tr.cfg.model.hidden_size)->capture_default_str()->check(CLI::PositiveNumber);
  c_train->add_option("--dense", tr.cfg.model.dense_size)->capture_default_str()->check(CLI::PositiveNumber);
  c_train->add_option("--dropout", tr.cfg.model.dropout)->capture_default_str()->check(CLI::Range(0.0, 0.99));
  c_train->add_option("--max-norm", tr.cfg.model.max_norm)->capture_default_str()->check(CLI::PositiveNumber);
  c_train->add_option("--rho", tr.cfg.train.adadelta.rho)->capture_default_str();
  c_train->add_option("--epsilon", tr.cfg.train.adadelta.epsilon)->capture_default_str();
  c_train->add_option("--min-count", tr.cfg.min_count)->capture_default_str()->check(CLI::PositiveNumber);
  c_train->add_option("--layer-order", tr.layer_order)->capture_default_str()->check(CLI::IsMember({"cnn-lstm", "lstm-cnn"}));
  c_train->add_flag("--keep-stopwords", tr.keep_stopwords);
  c_train->add_flag("--no-stem", tr.no_stem);
  c_train->add_flag("-q,--quiet", tr.quiet, "No per-epoch output");

  std::string model_dir, home, data, predictions, out_dir;
  auto* c_eval = app.add_subcommand("evaluate", "Classification report and confusion matrix");
  c_eval->add_option("--model-dir", model_dir);
  c_eval->add_option("--home", home);
  c_eval->add_option("--data", data, "Labelled corpus to classify");
  c_eval->add_option("--predictions", predictions, "TSV of true<TAB>predicted labels instead of a model");
  c_eval->add_option("--out-dir", out_dir, "Write report.csv, report.txt and confusion.csv");

  std::string cmp_train, cmp_test;
  std::uint64_t cmp_seed = 42;
  auto* c_cmp = app.add_subcommand("compare", "Baseline classifier grid (plus CNN-LSTM row with --model-dir)");
  c_cmp->add_option("--train", cmp_train)->required();
  c_cmp->add_option("--test", cmp_test)->required();
  c_cmp->add_option("--model-dir", model_dir);
  c_cmp->add_option("--out-dir", out_dir, "Write comparison.csv");
  c_cmp->add_option("--seed", cmp_seed)->capture_default_str();

  std::string sentence;
  auto* c_pred = app.add_subcommand("predict", "Classify one sentence and print the full response");
  c_pred->add_option("sentence", sentence)->required();
  c_pred->add_option("--model-dir", model_dir);
  c_pred->add_option("--home", home);

  double blend = 0.0;
  auto* c_inter = app.add_subcommand("interact", "Terminal conversation loop");
  c_inter->add_option("--model-dir", model_dir);
  c_inter->add_option("--home", home);
  c_inter->add_option("--blend", blend, "Memory recency blend weight")->check(CLI::Range(0.0, 1.0));

  std::string host = "127.0.0.1", ui_dir;
  int port = 8080;
  auto* c_serve = app.add_subcommand("serve", "HTTP service and console");
  c_serve->add_option("--model-dir", model_dir);
  c_serve->add_option("--home", home);
  c_serve->add_option("--host", host)->capture_default_str();
  c_serve->add_option("--port", port, "0 picks a free port")->capture_default_str()->check(CLI::Range(0, 65535));
  c_serve->add_option("--ui-dir", ui_dir, "Serve console assets from this directory");
  c_serve->add_option("--blend", blend)->check(CLI::Range(0.0, 1.0));

  std::string emotion, bml_out, doc_id = "bml-1";
  double intensity = 1.0;
  auto* c_bml = app.add_subcommand("export-bml", "Write the BML document for a sentence or emotion");
  c_bml->add_option("sentence", sentence);
  c_bml->add_option("--model-dir", model_dir);
  c_bml->add_option("--home", home);
  c_bml->add_option("--emotion", emotion, "Skip the classifier and use a peaked distribution");
  c_bml->add_option("--intensity", intensity, "Amount used with --emotion")->capture_default_str();
  c_bml->add_option("--id", doc_id)->capture_default_str();
  c_bml->add_option("-o,--out", bml_out, "Output file (default stdout)");

  std::string pearson_file;
  auto* c_pearson = app.add_subcommand("pearson", "Pairwise Pearson r and two-tailed p over numeric columns");
  c_pearson->add_option("file", pearson_file, "CSV/TSV with a header row")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_ingest) return run_ingest(ingest);
    if (*c_synth) return run_synth(synth_per_class, synth_seed, synth_out);
    if (*c_train) return run_train(tr);
    if (*c_eval) return run_evaluate(model_dir, home, data, predictions, out_dir);
    if (*c_cmp) return run_compare(cmp_train, cmp_test, model_dir, out_dir, cmp_seed);
    if (*c_pred) return run_predict(model_dir, home, sentence);
    if (*c_inter) return run_interact(model_dir, home, blend);
    if (*c_serve) return run_serve(model_dir, home, host, port, ui_dir, blend);
    if (*c_bml) return run_export_bml(model_dir, home, sentence, emotion, intensity, bml_out, doc_id);
    if (*c_pearson) return run_pearson(pearson_file);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const corpus::CorpusError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
