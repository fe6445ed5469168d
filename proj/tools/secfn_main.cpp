// secfn: classify the structure function of chapters in academic articles.
// One binary, subcommand style; config file plus flag overrides (flags win).
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "secfn/analysis.hpp"
#include "secfn/artifact.hpp"
#include "secfn/config.hpp"
#include "secfn/experiments.hpp"
#include "secfn/gradcheck.hpp"
#include "secfn/synth.hpp"

namespace fs = std::filesystem;
using namespace secfn;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  uint64_t seed = 42;
  bool seed_set = false;
  int jobs = 0;
  bool strict = true;
  bool lenient = false;
  std::string out_dir = ".";
  std::string format = "jsonl";
};

RunConfig make_config(const GlobalOpts& g) {
  RunConfig cfg;
  if (!g.config_path.empty()) cfg = load_run_config(g.config_path);
  for (const auto& ov : g.overrides) apply_config_override(cfg, ov);
  if (g.seed_set) {
    cfg.seed = g.seed;
    cfg.hyper.seed = g.seed;
    cfg.features.additional.seed = g.seed;
  }
  if (g.jobs > 0) cfg.jobs = g.jobs;
  if (g.lenient) cfg.strict = false;
  if (g.format == "xmlish") cfg.corpus_format = CorpusFormat::Xmlish;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  kernels::set_threads(cfg.jobs);
  return cfg;
}

Corpus load(const std::string& path, const RunConfig& cfg) {
  std::vector<std::string> warnings;
  ParseOptions opts;
  opts.format = cfg.corpus_format;
  opts.strict = cfg.strict;
  Corpus corpus = parse_corpus(path, opts, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return corpus;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  const fs::path p = fs::path(cfg.out_dir) / name;
  std::ofstream out(p);
  if (!out) throw DataError("cannot write output file: " + p.string());
  std::cerr << "writing " << p.string() << "\n";
  return out;
}

void stamp(std::ostream& out, const RunConfig& cfg) {
  out << "# seed=" << cfg.seed << "\n# config=" << hex_digest(cfg.digest()) << "\n";
}

EnabledCharacteristics parse_additional(const std::string& s) {
  EnabledCharacteristics e;
  if (s.empty() || s == "none") return e;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "loc") e.loc = true;
    else if (item == "cite") e.cite = true;
    else if (item == "ft" || item == "f&t") e.ft = true;
    else throw ConfigError("unknown characteristic '" + item + "' (loc|cite|ft)");
  }
  return e;
}

// Model argument: a classic family, "crf", or an architecture name extended
// with the --window/--direction/--fusion-encoder/--head-p flags.
std::string resolve_model_arg(const std::string& model, int window, const std::string& direction,
                              const std::string& fusion, double head_p, bool head_only,
                              const RunConfig& cfg) {
  if (model == "nb" || model == "lr" || model == "svm" || model == "knn" || model == "crf")
    return model;
  ModelSpec spec;
  spec.kind = parse_arch(model);
  spec.caps = cfg.caps;
  if (arch_is_contextual(spec.kind)) spec.window = window;
  if (!direction.empty()) spec.direction = parse_direction(direction);
  if (!fusion.empty())
    spec.fusion_encoder = fusion == "cnn" ? FusionEncoder::Cnn : FusionEncoder::Bilstm;
  if (spec.kind == ArchKind::FuseTitleContent) spec.fusion_encoder = FusionEncoder::Cnn;
  if (spec.kind == ArchKind::HeadTail) {
    spec.head_p = head_p;
    spec.head_and_tail = !head_only;
  }
  spec.validate();
  return spec.to_string();
}

void write_pareto_csv(std::ofstream out, const RunConfig& cfg,
                      const std::vector<ParetoRow>& rows) {
  stamp(out, cfg);
  out << "term,score,cumulative_share\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f\n", r.term.c_str(), r.score,
                  r.cumulative_share);
    out << buf;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"secfn: structure-function classification of article chapters"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand
  GlobalOpts g;
  app.add_option("--config", g.config_path, "INI config file");
  app.add_option("--set", g.overrides, "config override section.key=value")->take_all();
  app.add_option("--seed", g.seed, "run seed (echoed into outputs)")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--jobs", g.jobs, "worker threads for parallel kernels");
  app.add_flag("--strict", g.strict, "fail on malformed corpus records (default)");
  app.add_flag("--lenient", g.lenient, "skip malformed corpus records with warnings");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--format", g.format, "corpus format: jsonl|xmlish");

  auto* c_ingest = app.add_subcommand("ingest", "validate a corpus and normalize it to JSONL");
  std::string in_path, out_path = "corpus.normalized.jsonl";
  c_ingest->add_option("--in", in_path, "input corpus")->required();
  c_ingest->add_option("--out-file", out_path, "normalized JSONL output");

  auto* c_stats = app.add_subcommand("stats", "chapter counts per category");
  std::string stats_in;
  c_stats->add_option("--in", stats_in, "labeled corpus")->required();

  auto* c_kappa = app.add_subcommand("kappa", "inter-annotator agreement from a pair file");
  std::string pairs_path;
  c_kappa->add_option("--pairs", pairs_path, "CSV: item_id,label_a,label_b")->required();

  auto* c_feat = app.add_subcommand("featurize", "emit vocabulary and TF-IDF vectors");
  std::string feat_in, feat_input = "content", feat_add = "none";
  c_feat->add_option("--in", feat_in, "labeled corpus")->required();
  c_feat->add_option("--features", feat_input, "content|title|title+content");
  c_feat->add_option("--additional", feat_add, "characteristics: loc,cite,ft or none");

  auto* c_train = app.add_subcommand("train", "train a model on the whole corpus");
  std::string train_in, train_model = "lr", train_features = "content", train_add = "none";
  std::string model_out = "model.secfn";
  int opt_window = 1;
  std::string opt_direction = "both", opt_fusion;
  double opt_head_p = 0.1;
  bool opt_head_only = false;
  c_train->add_option("--in", train_in, "labeled corpus")->required();
  c_train->add_option("--model", train_model,
                      "nb|lr|svm|knn|crf or an architecture: cnn-title, bilstm-content, "
                      "hier-content, hier-attn-content, headtail-content, fuse-content, "
                      "fuse-title, fuse-title-content");
  c_train->add_option("--features", train_features, "classic input: content|title|title+content");
  c_train->add_option("--additional", train_add, "classic characteristics: loc,cite,ft");
  c_train->add_option("--model-out", model_out, "artifact filename under --out");
  c_train->add_option("--window", opt_window, "fusion window w");
  c_train->add_option("--direction", opt_direction, "previous|next|both");
  c_train->add_option("--fusion-encoder", opt_fusion, "bilstm|cnn");
  c_train->add_option("--head-p", opt_head_p, "head/tail slice proportion");
  c_train->add_flag("--head-only", opt_head_only, "head-only control slice");

  auto* c_eval = app.add_subcommand("evaluate", "evaluate an artifact on a labeled corpus");
  std::string eval_model, eval_in;
  c_eval->add_option("--model", eval_model, "artifact path")->required();
  c_eval->add_option("--in", eval_in, "labeled corpus")->required();

  auto* c_cv = app.add_subcommand("cv", "k-fold cross-validation for one family");
  std::string cv_in, cv_model = "lr", cv_features = "content", cv_add = "none";
  c_cv->add_option("--in", cv_in, "labeled corpus")->required();
  c_cv->add_option("--model", cv_model, "nb|lr|svm|knn|crf");
  c_cv->add_option("--features", cv_features, "content|title|title+content");
  c_cv->add_option("--additional", cv_add, "loc,cite,ft or none");

  auto* c_exp = app.add_subcommand("experiment", "run a named experiment ('list' to list ids)");
  std::string exp_id, exp_in, exp_direction, exp_fusion;
  int exp_window = -1;
  bool exp_save_artifacts = false;
  c_exp->add_option("id", exp_id, "experiment id or 'list'")->required();
  c_exp->add_option("--in", exp_in, "labeled corpus");
  c_exp->add_option("--window", exp_window, "restrict fusion grids to one window");
  c_exp->add_option("--direction", exp_direction, "restrict to previous|next|both");
  c_exp->add_option("--fusion-encoder", exp_fusion, "bilstm|cnn (DL-title-ext1)");
  c_exp->add_flag("--save-artifacts", exp_save_artifacts, "save trained models (DL rows)");

  auto* c_pred = app.add_subcommand("predict", "label an unlabeled corpus with an artifact");
  std::string pred_model, pred_in, pred_out;
  bool pred_force = false;
  c_pred->add_option("--model", pred_model, "artifact path")->required();
  c_pred->add_option("--in", pred_in, "raw corpus")->required();
  c_pred->add_option("--out-file", pred_out, "labeled JSONL output")->required();
  c_pred->add_flag("--force", pred_force, "overwrite labels already present");

  auto* c_open = app.add_subcommand("opentest", "open test on a disjoint labeled corpus");
  std::string open_model, open_in;
  c_open->add_option("--model", open_model, "artifact path")->required();
  c_open->add_option("--in", open_in, "labeled corpus, disjoint from training ids")->required();

  auto* c_time = app.add_subcommand("timeseries", "yearly proportion and frequency tables");
  std::string time_in;
  c_time->add_option("--in", time_in, "labeled corpus with years")->required();

  auto* c_chi = app.add_subcommand("chi-analysis", "weighted and contextual chi-square rankings");
  std::string chi_in, chi_target = "method", chi_offsets = "-1,-2,-3";
  int chi_top_k = 100, chi_drop_top = 0;
  c_chi->add_option("--in", chi_in, "labeled corpus")->required();
  c_chi->add_option("--target", chi_target, "target class for the contextual analysis");
  c_chi->add_option("--offsets", chi_offsets, "neighbor offsets, comma separated");
  c_chi->add_option("--top-k", chi_top_k, "rows kept in the Pareto tables");
  c_chi->add_option("--drop-top", chi_drop_top, "largest outliers dropped before ranking");

  auto* c_abl = app.add_subcommand("ablate-order", "chapter-order ablation for a fusion model");
  std::string abl_in, abl_arch = "fuse-title", abl_direction = "both", abl_fusion;
  int abl_window = 1;
  c_abl->add_option("--in", abl_in, "labeled corpus")->required();
  c_abl->add_option("--arch", abl_arch, "fuse-content|fuse-title|fuse-title-content");
  c_abl->add_option("--window", abl_window, "fusion window w >= 1");
  c_abl->add_option("--direction", abl_direction, "previous|next|both");
  c_abl->add_option("--fusion-encoder", abl_fusion, "bilstm|cnn");

  auto* c_grad = app.add_subcommand("gradcheck", "finite-difference checks of all encoders");
  int grad_trials = 20;
  c_grad->add_option("--trials", grad_trials, "random trials per block");

  auto* c_synth = app.add_subcommand("synth", "generate the synthetic test corpus");
  int synth_articles = 500;
  std::string synth_out = "synth.jsonl", synth_sidecar;
  double synth_ambiguity = -1.0, synth_signal = -1.0, synth_leak = -1.0;
  c_synth->add_option("--articles", synth_articles, "number of articles");
  c_synth->add_option("--out-file", synth_out, "corpus JSONL filename under --out");
  c_synth->add_option("--sidecar", synth_sidecar, "bookkeeping JSON (default <out>.sidecar.json)");
  c_synth->add_option("--title-ambiguity", synth_ambiguity, "generic-title rate");
  c_synth->add_option("--content-signal", synth_signal, "class-keyword rate per sentence");
  c_synth->add_option("--content-leak", synth_leak, "wrong-class keyword rate per sentence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints usage/help text
    return code == 0 ? 0 : 2;
  }
  RunConfig cfg = make_config(g);

  if (c_ingest->parsed()) {
    Corpus corpus = load(in_path, cfg);
    fs::create_directories(cfg.out_dir);
    const fs::path p = fs::path(cfg.out_dir) / out_path;
    serialize_corpus(corpus, p.string());
    std::cout << "ingested " << corpus.size() << " articles -> " << p.string() << "\n";
    return 0;
  }

  if (c_stats->parsed()) {
    Corpus corpus = load(stats_in, cfg);
    const CorpusStats st = corpus_stats(corpus, cfg.strict);
    auto csv = open_out(cfg, "stats.csv");
    stamp(csv, cfg);
    csv << "label,count\n";
    for (Label l : all_labels())
      csv << label_name(l) << "," << st.label_counts[static_cast<size_t>(label_id(l))] << "\n";
    std::cout << "articles " << st.articles << ", chapters " << st.chapters << "\n";
    for (Label l : all_labels())
      std::cout << "  " << label_name(l) << " "
                << st.label_counts[static_cast<size_t>(label_id(l))] << "\n";
    return 0;
  }

  if (c_kappa->parsed()) {
    const AnnotationPair pair = load_annotation_pairs(pairs_path);
    std::printf("items %zu\nkappa %.6f\n", pair.items.size(), cohen_kappa(pair));
    return 0;
  }

  if (c_feat->parsed()) {
    Corpus corpus = load(feat_in, cfg);
    std::vector<int> all_articles;
    for (size_t i = 0; i < corpus.size(); ++i) all_articles.push_back(static_cast<int>(i));
    std::vector<std::string> warnings;
    const FeaturePipeline pipe =
        fit_pipeline(corpus, all_articles, parse_pipeline_input(feat_input), cfg.features,
                     parse_additional(feat_add), "full-seed" + std::to_string(cfg.seed) + "-train",
                     &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    AdditionalCodes codes(cfg.features.additional);
    auto vout = open_out(cfg, "vocabulary.csv");
    stamp(vout, cfg);
    vout << "block,term,id,doc_freq\n";
    auto dump_vocab = [&](const char* block, const Vocabulary& v) {
      for (int t = 0; t < v.size(); ++t)
        vout << block << "," << v.id_to_term[static_cast<size_t>(t)] << "," << t << ","
             << v.doc_freq[static_cast<size_t>(t)] << "\n";
    };
    if (pipe.input != FeaturePipeline::Input::Content) dump_vocab("title", pipe.title_vocab);
    if (pipe.input != FeaturePipeline::Input::Title) dump_vocab("content", pipe.content_vocab);
    auto xout = open_out(cfg, "vectors.txt");
    stamp(xout, cfg);
    char buf[64];
    for (const Article& a : corpus)
      for (int ci = 0; ci < static_cast<int>(a.chapters.size()); ++ci) {
        const SparseVector x = pipe.vectorize(a, ci, codes);
        xout << a.id << " " << ci + 1 << " " << x.dim;
        for (const auto& [idx, w] : x.entries) {
          std::snprintf(buf, sizeof(buf), " %d:%.9g", idx, w);
          xout << buf;
        }
        xout << "\n";
      }
    std::cout << "featurized " << corpus.size() << " articles (dim " << pipe.dim() << ")\n";
    return 0;
  }

  if (c_train->parsed()) {
    Corpus corpus = load(train_in, cfg);
    const std::string family = resolve_model_arg(train_model, opt_window, opt_direction,
                                                 opt_fusion, opt_head_p, opt_head_only, cfg);
    const ModelArtifact art = train_family(family, corpus, cfg,
                                           parse_pipeline_input(train_features),
                                           parse_additional(train_add));
    fs::create_directories(cfg.out_dir);
    const fs::path p = fs::path(cfg.out_dir) / model_out;
    save_artifact(art, p.string());
    std::cout << "trained " << art.family << " -> " << p.string() << "\n";
    return 0;
  }

  if (c_eval->parsed()) {
    const ModelArtifact art = load_artifact(eval_model);
    Corpus corpus = load(eval_in, cfg);
    const MetricsReport rep = evaluate_artifact(art, corpus, cfg);
    std::cout << rep.to_text("evaluate " + art.family);
    return 0;
  }

  if (c_cv->parsed()) {
    Corpus corpus = load(cv_in, cfg);
    const ExperimentResult res = run_family_cv(cv_model, parse_pipeline_input(cv_features),
                                               parse_additional(cv_add), corpus, cfg);
    auto csv = open_out(cfg, "cv_" + cv_model + ".csv");
    write_report_csv(res, csv, cfg.seed, cfg.digest());
    std::cout << report_text(res);
    return 0;
  }

  if (c_exp->parsed()) {
    if (exp_id == "list") {
      for (const auto& id : experiment_ids()) std::cout << id << "\n";
      return 0;
    }
    if (exp_in.empty()) throw ConfigError("experiment: --in corpus required");
    Corpus corpus = load(exp_in, cfg);
    GridFilter filter;
    if (exp_window >= 0) filter.window = exp_window;
    if (!exp_direction.empty()) filter.direction = parse_direction(exp_direction);
    if (!exp_fusion.empty())
      filter.fusion_encoder = exp_fusion == "cnn" ? FusionEncoder::Cnn : FusionEncoder::Bilstm;
    filter.keep_artifacts = exp_save_artifacts;
    ExperimentResult res = run_experiment(exp_id, corpus, cfg, filter);
    auto csv = open_out(cfg, exp_id + ".csv");
    write_report_csv(res, csv, cfg.seed, cfg.digest());
    auto txt = open_out(cfg, exp_id + ".txt");
    stamp(txt, cfg);
    txt << report_text(res);
    for (size_t i = 0; i < res.artifacts.size(); ++i) {
      const fs::path p = fs::path(cfg.out_dir) / (exp_id + "_row" + std::to_string(i) + ".secfn");
      save_artifact(res.artifacts[i], p.string());
      std::cerr << "writing " << p.string() << "\n";
    }
    std::cout << report_text(res);
    return 0;
  }

  if (c_pred->parsed()) {
    const ModelArtifact art = load_artifact(pred_model);
    Corpus corpus = load(pred_in, cfg);
    if (!pred_force) {
      for (const Article& a : corpus)
        for (const Chapter& c : a.chapters)
          if (c.label)
            throw DataError("predict: input already labeled (article '" + a.id +
                            "'); pass --force to overwrite");
    }
    const std::vector<Label> pred = predict_with_artifact(art, corpus, cfg);
    size_t k = 0;
    for (Article& a : corpus)
      for (Chapter& c : a.chapters) c.label = pred[k++];
    fs::create_directories(cfg.out_dir);
    const fs::path p = fs::path(cfg.out_dir) / pred_out;
    serialize_corpus(corpus, p.string());
    std::cout << "labeled " << k << " chapters -> " << p.string() << "\n";
    return 0;
  }

  if (c_open->parsed()) {
    const ModelArtifact art = load_artifact(open_model);
    Corpus corpus = load(open_in, cfg);
    const MetricsReport rep = open_test(art, corpus, cfg);
    std::cout << rep.to_text("open test " + art.family);
    return 0;
  }

  if (c_time->parsed()) {
    Corpus corpus = load(time_in, cfg);
    char buf[128];
    auto dump = [&](const YearlyTable& t, const std::string& name) {
      auto out = open_out(cfg, name);
      stamp(out, cfg);
      out << "year,label,value\n";
      for (const auto& row : t.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%.6f\n", row.year, label_name(row.label).c_str(),
                      row.value);
        out << buf;
      }
    };
    dump(yearly_proportion(corpus), "timeseries_proportion.csv");
    dump(yearly_avg_frequency(corpus), "timeseries_avg_frequency.csv");
    std::cout << "wrote yearly tables for " << corpus.size() << " articles\n";
    return 0;
  }

  if (c_chi->parsed()) {
    Corpus corpus = load(chi_in, cfg);
    for (const bool title : {true, false}) {
      std::vector<TokenDoc> docs;
      std::vector<Label> labels;
      for (const Article& a : corpus)
        for (const Chapter& c : a.chapters) {
          if (!c.label) throw DataError("chi-analysis needs labels: article '" + a.id + "'");
          labels.push_back(*c.label);
          const std::string text =
              title ? (cfg.features.strip_title_numbers ? strip_index_numbers(c.title) : c.title)
                    : c.content;
          docs.push_back(tokenize_normalize(text, cfg.features.stopwords));
        }
      const Vocabulary vocab = build_vocabulary(docs, labels, "chi-analysis");
      std::vector<std::pair<std::string, double>> scores;
      scores.reserve(static_cast<size_t>(vocab.size()));
      for (int t = 0; t < vocab.size(); ++t)
        scores.emplace_back(vocab.id_to_term[static_cast<size_t>(t)], weighted_chi(vocab, t));
      write_pareto_csv(open_out(cfg, std::string("weighted_chi_") + (title ? "title" : "content") +
                                         ".csv"),
                       cfg, pareto_data(scores, chi_top_k, chi_drop_top));
    }
    const Label target = parse_label(chi_target);
    std::stringstream offs(chi_offsets);
    std::string item;
    while (std::getline(offs, item, ',')) {
      const int offset = std::stoi(item);
      const auto ranked = context_chi_analysis(corpus, target, offset, cfg.features.stopwords);
      auto out = open_out(cfg, "context_chi_" + chi_target + "_" + item + ".csv");
      if (ranked.empty()) {
        stamp(out, cfg);
        out << "term,score,cumulative_share\n";
        continue;
      }
      write_pareto_csv(std::move(out), cfg, pareto_data(ranked, chi_top_k, chi_drop_top));
    }
    std::cout << "chi analysis written\n";
    return 0;
  }

  if (c_abl->parsed()) {
    Corpus corpus = load(abl_in, cfg);
    ModelSpec spec;
    spec.kind = parse_arch(abl_arch);
    spec.window = abl_window;
    spec.direction = parse_direction(abl_direction);
    spec.caps = cfg.caps;
    if (!abl_fusion.empty())
      spec.fusion_encoder = abl_fusion == "cnn" ? FusionEncoder::Cnn : FusionEncoder::Bilstm;
    if (spec.kind == ArchKind::FuseTitleContent) spec.fusion_encoder = FusionEncoder::Cnn;
    spec.validate();
    const ExperimentResult res = order_ablation(spec, corpus, cfg);
    auto csv = open_out(cfg, "ablate_order.csv");
    write_report_csv(res, csv, cfg.seed, cfg.digest());
    std::cout << report_text(res);
    return 0;
  }

  if (c_grad->parsed()) {
    const auto results = run_gradient_checks(grad_trials, cfg.seed);
    bool all_pass = true;
    for (const auto& r : results) {
      std::printf("%-24s trials %3d  max rel err %.3e  %s\n", r.block.c_str(), r.trials,
                  r.max_rel_err, r.pass ? "ok" : "FAIL");
      all_pass = all_pass && r.pass;
    }
    if (!all_pass) throw InternalError("gradient checks failed");
    return 0;
  }

  if (c_synth->parsed()) {
    SynthConfig sc;
    sc.n_articles = synth_articles;
    sc.seed = cfg.seed;
    if (synth_ambiguity >= 0.0) sc.title_ambiguity = synth_ambiguity;
    if (synth_signal >= 0.0) sc.content_signal = synth_signal;
    if (synth_leak >= 0.0) sc.content_leak = synth_leak;
    const SynthResult res = generate_synth(sc);
    fs::create_directories(cfg.out_dir);
    const fs::path p = fs::path(cfg.out_dir) / synth_out;
    serialize_corpus(res.corpus, p.string());
    const std::string sidecar =
        synth_sidecar.empty() ? p.string() + ".sidecar.json" : synth_sidecar;
    write_bookkeeping(res.bookkeeping, sidecar);
    std::cout << "generated " << res.corpus.size() << " articles -> " << p.string()
              << " (sidecar " << sidecar << ")\n";
    return 0;
  }

  throw ConfigError("no subcommand handled");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
