#include "secfn/artifact.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace secfn {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void put_le_double(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_le_double(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw DataError("artifact: truncated binary parameter block");
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

class LineReader {
 public:
  LineReader(std::istream& in, const std::string& path) : in_(in), path_(path) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) throw DataError(path_ + ": unexpected end of artifact");
    ++line_no_;
    return line;
  }

  std::istringstream next_tokens(const std::string& expect_head) {
    std::string line = next();
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    if (head != expect_head)
      throw DataError(path_ + ":" + std::to_string(line_no_) + ": expected '" + expect_head +
                      "', found '" + head + "'");
    return ss;
  }

  std::istream& stream() { return in_; }

 private:
  std::istream& in_;
  std::string path_;
  int line_no_ = 0;
};

void write_vocab(std::ostream& out, const std::string& name, const Vocabulary& v) {
  out << "vocab " << name << " " << v.size() << " " << v.n_docs << " " << v.fit_tag << "\n";
  out << "vocab_class_docs";
  for (int c = 0; c < kNumLabels; ++c) out << " " << v.n_docs_per_class[static_cast<size_t>(c)];
  out << "\n";
  for (int t = 0; t < v.size(); ++t) {
    out << "term " << v.id_to_term[static_cast<size_t>(t)] << " "
        << v.doc_freq[static_cast<size_t>(t)];
    for (int c = 0; c < kNumLabels; ++c)
      out << " " << v.class_term_doc[static_cast<size_t>(t)][static_cast<size_t>(c)];
    out << "\n";
  }
}

Vocabulary read_vocab(LineReader& r, const std::string& expect_name) {
  auto head = r.next_tokens("vocab");
  std::string name;
  int size = 0;
  Vocabulary v;
  head >> name >> size >> v.n_docs >> v.fit_tag;
  if (name != expect_name) throw DataError("artifact: expected vocab '" + expect_name + "'");
  auto cls = r.next_tokens("vocab_class_docs");
  for (int c = 0; c < kNumLabels; ++c) cls >> v.n_docs_per_class[static_cast<size_t>(c)];
  for (int t = 0; t < size; ++t) {
    auto ts = r.next_tokens("term");
    std::string term;
    int64_t df = 0;
    ts >> term >> df;
    std::array<int64_t, kNumLabels> ctd{};
    for (int c = 0; c < kNumLabels; ++c) ts >> ctd[static_cast<size_t>(c)];
    v.term_to_id.emplace(term, t);
    v.id_to_term.push_back(term);
    v.doc_freq.push_back(df);
    v.class_term_doc.push_back(ctd);
  }
  return v;
}

void write_pipeline(std::ostream& out, const FeaturePipeline& p) {
  out << "pipeline " << pipeline_input_name(p.input) << " " << (p.enabled.loc ? 1 : 0)
      << (p.enabled.cite ? 1 : 0) << (p.enabled.ft ? 1 : 0) << " " << p.fit_tag << "\n";
  const FeatureConfig& fc = p.config;
  out << "feature_config " << static_cast<int>(fc.selection) << " " << fc.top_k << " "
      << (fc.strip_title_numbers ? 1 : 0) << " " << fc.additional.code_dim << " "
      << fc.additional.seed << "\n";
  out << "loc_bins " << fc.additional.loc_bins.size();
  for (double e : fc.additional.loc_bins) out << " " << fmt(e);
  out << "\ncite_bins " << fc.additional.cite_bins.size();
  for (int e : fc.additional.cite_bins) out << " " << e;
  out << "\nft_bins " << fc.additional.ft_bins.size();
  for (int e : fc.additional.ft_bins) out << " " << e;
  out << "\nstopwords " << fc.stopwords.size();
  for (const auto& s : fc.stopwords) out << " " << s;
  out << "\n";
  if (p.input != FeaturePipeline::Input::Content) write_vocab(out, "title", p.title_vocab);
  if (p.input != FeaturePipeline::Input::Title) write_vocab(out, "content", p.content_vocab);
}

FeaturePipeline read_pipeline(LineReader& r) {
  FeaturePipeline p;
  {
    auto ss = r.next_tokens("pipeline");
    std::string input, flags;
    ss >> input >> flags >> p.fit_tag;
    p.input = parse_pipeline_input(input);
    if (flags.size() != 3) throw DataError("artifact: bad enabled-characteristics flags");
    p.enabled.loc = flags[0] == '1';
    p.enabled.cite = flags[1] == '1';
    p.enabled.ft = flags[2] == '1';
  }
  {
    auto ss = r.next_tokens("feature_config");
    int sel = 0, strip = 0;
    ss >> sel >> p.config.top_k >> strip >> p.config.additional.code_dim >> p.config.additional.seed;
    p.config.selection = static_cast<SelectionMethod>(sel);
    p.config.strip_title_numbers = strip != 0;
  }
  {
    auto ss = r.next_tokens("loc_bins");
    size_t n = 0;
    ss >> n;
    p.config.additional.loc_bins.assign(n, 0.0);
    for (auto& e : p.config.additional.loc_bins) ss >> e;
  }
  {
    auto ss = r.next_tokens("cite_bins");
    size_t n = 0;
    ss >> n;
    p.config.additional.cite_bins.assign(n, 0);
    for (auto& e : p.config.additional.cite_bins) ss >> e;
  }
  {
    auto ss = r.next_tokens("ft_bins");
    size_t n = 0;
    ss >> n;
    p.config.additional.ft_bins.assign(n, 0);
    for (auto& e : p.config.additional.ft_bins) ss >> e;
  }
  {
    auto ss = r.next_tokens("stopwords");
    size_t n = 0;
    ss >> n;
    p.config.stopwords.clear();
    for (size_t i = 0; i < n; ++i) {
      std::string w;
      ss >> w;
      p.config.stopwords.insert(w);
    }
  }
  if (p.input != FeaturePipeline::Input::Content) p.title_vocab = read_vocab(r, "title");
  if (p.input != FeaturePipeline::Input::Title) p.content_vocab = read_vocab(r, "content");
  return p;
}

}  // namespace

void save_artifact(const ModelArtifact& art, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write artifact: " + path);
  out << "secfn-artifact v1\n";
  out << "family " << art.family << "\n";
  out << "config_digest " << hex_digest(art.config_digest) << "\n";
  out << "seed " << art.seed << "\n";
  out << "train_ids " << art.train_ids.size() << "\n";
  for (const auto& id : art.train_ids) out << id << "\n";

  if (art.family == "nb" || art.family == "lr" || art.family == "svm" || art.family == "knn") {
    write_pipeline(out, art.pipeline);
  }
  if (art.family == "nb") {
    out << "nb " << art.nb.dim << "\n";
    out << "nb_prior";
    for (int c = 0; c < kNumLabels; ++c)
      out << " " << fmt(art.nb.log_prior[static_cast<size_t>(c)]) << " "
          << (art.nb.class_present[static_cast<size_t>(c)] ? 1 : 0);
    out << "\n";
    for (int t = 0; t < art.nb.dim; ++t) {
      out << "nb_row";
      for (int c = 0; c < kNumLabels; ++c)
        out << " " << fmt(art.nb.log_likelihood[static_cast<size_t>(t)][static_cast<size_t>(c)]);
      out << "\n";
    }
  } else if (art.family == "lr" || art.family == "svm") {
    out << "linear " << art.linear.dim << " " << (art.linear.loss == PairLoss::Hinge ? 1 : 0)
        << " " << fmt(art.linear.c) << " " << art.linear.pairs.size() << "\n";
    for (const auto& pr : art.linear.pairs) {
      out << "pair " << pr.class_a << " " << pr.class_b << " " << fmt(pr.bias) << "\n";
      out << "w";
      for (double v : pr.w) out << " " << fmt(v);
      out << "\n";
    }
  } else if (art.family == "knn") {
    out << "knn " << art.knn.dim << " " << art.knn.k << " " << art.knn.vectors.size() << "\n";
    for (size_t i = 0; i < art.knn.vectors.size(); ++i) {
      out << "vec " << label_id(art.knn.labels[i]) << " " << art.knn.vectors[i].entries.size();
      for (const auto& [idx, w] : art.knn.vectors[i].entries) out << " " << idx << ":" << fmt(w);
      out << "\n";
    }
  } else if (art.family == "crf") {
    out << "crf " << art.crf.n_features << " " << fmt(art.crf.lambda) << " "
        << art.crf_dict.fit_tag << "\n";
    std::vector<const std::string*> by_id(static_cast<size_t>(art.crf_dict.size()));
    for (const auto& [f, id] : art.crf_dict.ids) by_id[static_cast<size_t>(id)] = &f;
    for (int f = 0; f < art.crf.n_features; ++f) {
      out << "feat";
      for (int c = 0; c < kNumLabels; ++c)
        out << " " << fmt(art.crf.unary[static_cast<size_t>(f)][static_cast<size_t>(c)]);
      out << " " << *by_id[static_cast<size_t>(f)] << "\n";
    }
    out << "trans";
    for (int a = 0; a < kNumLabels; ++a)
      for (int b = 0; b < kNumLabels; ++b)
        out << " " << fmt(art.crf.trans[static_cast<size_t>(a)][static_cast<size_t>(b)]);
    out << "\n";
  } else if (art.family == "neural") {
    out << "spec " << art.neural_spec << "\n";
    const Hyper& h = art.neural_hyper;
    out << "hyper " << fmt(h.learning_rate) << " " << h.batch_size << " " << fmt(h.dropout) << " "
        << h.lstm_hidden << " " << h.cnn_filters << " " << h.embed_dim << " " << h.max_epochs
        << " " << h.patience << " " << h.seed << " " << h.micro_batch << " "
        << h.cnn_heights.size();
    for (int x : h.cnn_heights) out << " " << x;
    out << "\n";
    out << "vocab_size " << art.neural_vocab.size() << " " << art.neural_vocab.fit_tag << "\n";
    std::vector<const std::string*> by_id(static_cast<size_t>(art.neural_vocab.size()) + 1);
    for (const auto& [tok, id] : art.neural_vocab.ids) by_id[static_cast<size_t>(id)] = &tok;
    for (int i = 1; i <= art.neural_vocab.size(); ++i)
      out << "tok " << *by_id[static_cast<size_t>(i)] << "\n";
    out << "params " << art.neural_params.size() << "\n";
    for (size_t i = 0; i < art.neural_params.size(); ++i)
      out << "param " << art.neural_param_names[i] << " " << art.neural_params[i].rows << " "
          << art.neural_params[i].cols << "\n";
    out << "BINARY\n";
    for (const Mat& m : art.neural_params)
      for (double v : m.a) put_le_double(out, v);
    out << "\n";
  } else {
    throw InternalError("save_artifact: unknown family '" + art.family + "'");
  }
  out << "end\n";
  if (!out) throw DataError("error while writing artifact: " + path);
}

ModelArtifact load_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open artifact: " + path);
  LineReader r(in, path);
  if (r.next() != "secfn-artifact v1")
    throw DataError(path + ": not a secfn artifact (bad magic line)");
  ModelArtifact art;
  {
    auto ss = r.next_tokens("family");
    ss >> art.family;
  }
  {
    auto ss = r.next_tokens("config_digest");
    std::string hex;
    ss >> hex;
    art.config_digest = std::strtoull(hex.c_str(), nullptr, 16);
  }
  {
    auto ss = r.next_tokens("seed");
    ss >> art.seed;
  }
  {
    auto ss = r.next_tokens("train_ids");
    size_t n = 0;
    ss >> n;
    art.train_ids.reserve(n);
    for (size_t i = 0; i < n; ++i) art.train_ids.push_back(r.next());
  }

  if (art.family == "nb" || art.family == "lr" || art.family == "svm" || art.family == "knn") {
    art.pipeline = read_pipeline(r);
  }
  if (art.family == "nb") {
    auto ss = r.next_tokens("nb");
    ss >> art.nb.dim;
    auto ps = r.next_tokens("nb_prior");
    for (int c = 0; c < kNumLabels; ++c) {
      int present = 0;
      ps >> art.nb.log_prior[static_cast<size_t>(c)] >> present;
      art.nb.class_present[static_cast<size_t>(c)] = present != 0;
    }
    art.nb.log_likelihood.resize(static_cast<size_t>(art.nb.dim));
    for (int t = 0; t < art.nb.dim; ++t) {
      auto rs = r.next_tokens("nb_row");
      for (int c = 0; c < kNumLabels; ++c)
        rs >> art.nb.log_likelihood[static_cast<size_t>(t)][static_cast<size_t>(c)];
    }
  } else if (art.family == "lr" || art.family == "svm") {
    auto ss = r.next_tokens("linear");
    int hinge = 0;
    size_t pairs = 0;
    ss >> art.linear.dim >> hinge >> art.linear.c >> pairs;
    art.linear.loss = hinge ? PairLoss::Hinge : PairLoss::Logistic;
    for (size_t i = 0; i < pairs; ++i) {
      PairwiseLinearModel::Pair pr;
      auto ps = r.next_tokens("pair");
      ps >> pr.class_a >> pr.class_b >> pr.bias;
      auto ws = r.next_tokens("w");
      pr.w.assign(static_cast<size_t>(art.linear.dim), 0.0);
      for (auto& v : pr.w) ws >> v;
      art.linear.pairs.push_back(std::move(pr));
    }
  } else if (art.family == "knn") {
    auto ss = r.next_tokens("knn");
    size_t n = 0;
    ss >> art.knn.dim >> art.knn.k >> n;
    for (size_t i = 0; i < n; ++i) {
      auto vs = r.next_tokens("vec");
      int lid = 0;
      size_t nnz = 0;
      vs >> lid >> nnz;
      SparseVector v;
      v.dim = art.knn.dim;
      for (size_t e = 0; e < nnz; ++e) {
        std::string tok;
        vs >> tok;
        const size_t colon = tok.find(':');
        v.entries.emplace_back(std::stoi(tok.substr(0, colon)),
                               std::stod(tok.substr(colon + 1)));
      }
      art.knn.vectors.push_back(std::move(v));
      art.knn.labels.push_back(label_from_id(lid));
    }
  } else if (art.family == "crf") {
    auto ss = r.next_tokens("crf");
    ss >> art.crf.n_features >> art.crf.lambda >> art.crf_dict.fit_tag;
    art.crf.unary.resize(static_cast<size_t>(art.crf.n_features));
    for (int f = 0; f < art.crf.n_features; ++f) {
      std::string line = r.next();
      std::istringstream fs(line);
      std::string head;
      fs >> head;
      if (head != "feat") throw DataError(path + ": expected 'feat' line");
      for (int c = 0; c < kNumLabels; ++c)
        fs >> art.crf.unary[static_cast<size_t>(f)][static_cast<size_t>(c)];
      std::string feature;
      std::getline(fs, feature);
      if (!feature.empty() && feature[0] == ' ') feature.erase(0, 1);
      art.crf_dict.ids.emplace(feature, f);
    }
    auto ts = r.next_tokens("trans");
    for (int a = 0; a < kNumLabels; ++a)
      for (int b = 0; b < kNumLabels; ++b)
        ts >> art.crf.trans[static_cast<size_t>(a)][static_cast<size_t>(b)];
  } else if (art.family == "neural") {
    {
      std::string line = r.next();
      if (line.rfind("spec ", 0) != 0) throw DataError(path + ": expected 'spec' line");
      art.neural_spec = line.substr(5);
    }
    {
      auto ss = r.next_tokens("hyper");
      Hyper& h = art.neural_hyper;
      size_t nh = 0;
      ss >> h.learning_rate >> h.batch_size >> h.dropout >> h.lstm_hidden >> h.cnn_filters >>
          h.embed_dim >> h.max_epochs >> h.patience >> h.seed >> h.micro_batch >> nh;
      h.cnn_heights.assign(nh, 0);
      for (auto& x : h.cnn_heights) ss >> x;
    }
    {
      auto ss = r.next_tokens("vocab_size");
      int n = 0;
      ss >> n >> art.neural_vocab.fit_tag;
      for (int i = 0; i < n; ++i) {
        auto ts = r.next_tokens("tok");
        std::string tok;
        ts >> tok;
        art.neural_vocab.add(tok);
      }
    }
    size_t n_params = 0;
    {
      auto ss = r.next_tokens("params");
      ss >> n_params;
    }
    for (size_t i = 0; i < n_params; ++i) {
      auto ss = r.next_tokens("param");
      std::string name;
      int rows = 0, cols = 0;
      ss >> name >> rows >> cols;
      art.neural_param_names.push_back(name);
      art.neural_params.emplace_back(rows, cols);
    }
    if (r.next() != "BINARY") throw DataError(path + ": expected BINARY marker");
    for (Mat& m : art.neural_params)
      for (double& v : m.a) v = get_le_double(r.stream());
    // consume the trailing newline the text reader expects before "end"
    char c;
    while (r.stream().get(c) && c != '\n') {
    }
  } else {
    throw DataError(path + ": unknown model family '" + art.family + "'");
  }
  if (r.next() != "end") throw DataError(path + ": missing artifact terminator");
  return art;
}

NeuralModel restore_neural(const ModelArtifact& art) {
  if (art.family != "neural") throw DataError("restore_neural: not a neural artifact");
  NeuralModel model(ModelSpec::from_string(art.neural_spec), art.neural_hyper, art.neural_vocab);
  model.init_params(art.neural_hyper.seed);
  std::vector<Param*> params = model.params();
  if (params.size() != art.neural_params.size())
    throw DataError("restore_neural: parameter manifest mismatch (count)");
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i]->name != art.neural_param_names[i] ||
        !params[i]->w.same_shape(art.neural_params[i]))
      throw DataError("restore_neural: parameter manifest mismatch at '" +
                      art.neural_param_names[i] + "'");
    params[i]->w = art.neural_params[i];
  }
  return model;
}

void store_neural(ModelArtifact& art, NeuralModel& model) {
  art.family = "neural";
  art.neural_spec = model.spec().to_string();
  art.neural_hyper = model.hyper();
  art.neural_vocab = model.vocab();
  art.neural_param_names.clear();
  art.neural_params.clear();
  for (Param* p : model.params()) {
    art.neural_param_names.push_back(p->name);
    art.neural_params.push_back(p->w);
  }
}

}  // namespace secfn
