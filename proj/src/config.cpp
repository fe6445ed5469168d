#include "secfn/config.hpp"

#include <fstream>
#include <sstream>

namespace secfn {

namespace {

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: boolean expected for '" + key + "', got '" + v + "'");
}

void set_key(RunConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value) {
  const std::string full = section.empty() ? key : section + "." + key;
  try {
    if (full == "seed" || full == "run.seed") {
      cfg.seed = std::stoull(value);
      cfg.hyper.seed = cfg.seed;
      cfg.features.additional.seed = cfg.seed;
    } else if (full == "jobs" || full == "run.jobs") {
      cfg.jobs = std::stoi(value);
    } else if (full == "run.out_dir") {
      cfg.out_dir = value;
    } else if (full == "corpus.format") {
      if (value == "jsonl") cfg.corpus_format = CorpusFormat::Jsonl;
      else if (value == "xmlish") cfg.corpus_format = CorpusFormat::Xmlish;
      else throw ConfigError("config: corpus.format must be jsonl or xmlish");
    } else if (full == "corpus.strict") {
      cfg.strict = parse_bool(value, full);
    } else if (full == "features.selection") {
      if (value == "chi") cfg.features.selection = SelectionMethod::Chi;
      else if (value == "ig") cfg.features.selection = SelectionMethod::Ig;
      else if (value == "none") cfg.features.selection = SelectionMethod::None;
      else throw ConfigError("config: features.selection must be chi, ig or none");
    } else if (full == "features.top_k") {
      cfg.features.top_k = std::stoi(value);
    } else if (full == "features.strip_title_numbers") {
      cfg.features.strip_title_numbers = parse_bool(value, full);
    } else if (full == "features.code_dim") {
      cfg.features.additional.code_dim = std::stoi(value);
    } else if (full == "features.additional_seed") {
      cfg.features.additional.seed = std::stoull(value);
    } else if (full == "features.loc_bins") {
      cfg.features.additional.loc_bins.clear();
      for (const auto& v : split_csv(value))
        cfg.features.additional.loc_bins.push_back(std::stod(v));
    } else if (full == "features.cite_bins") {
      cfg.features.additional.cite_bins.clear();
      for (const auto& v : split_csv(value))
        cfg.features.additional.cite_bins.push_back(std::stoi(v));
    } else if (full == "features.ft_bins") {
      cfg.features.additional.ft_bins.clear();
      for (const auto& v : split_csv(value))
        cfg.features.additional.ft_bins.push_back(std::stoi(v));
    } else if (full == "features.stopwords") {
      if (value == "default") {
        cfg.features.stopwords = default_stopwords();
      } else if (value == "none") {
        cfg.features.stopwords.clear();
      } else {
        cfg.features.stopwords.clear();
        for (const auto& v : split_csv(value)) cfg.features.stopwords.insert(v);
      }
    } else if (full == "features.title_cap") {
      cfg.caps.title_cap = std::stoi(value);
    } else if (full == "features.sent_cap") {
      cfg.caps.sent_cap = std::stoi(value);
    } else if (full == "features.max_sents") {
      cfg.caps.max_sents = std::stoi(value);
    } else if (full == "features.flat_cap") {
      cfg.caps.flat_cap = std::stoi(value);
    } else if (full == "model.crf_lambda") {
      cfg.crf_lambda = std::stod(value);
    } else if (full == "model.knn_k") {
      cfg.knn_k = std::stoi(value);
    } else if (full == "model.linear_c") {
      cfg.linear_c = std::stod(value);
    } else if (full == "model.linear_max_iters") {
      cfg.linear_max_iters = std::stoi(value);
    } else if (full == "train.learning_rate") {
      cfg.hyper.learning_rate = std::stod(value);
    } else if (full == "train.batch_size") {
      cfg.hyper.batch_size = std::stoi(value);
    } else if (full == "train.dropout") {
      cfg.hyper.dropout = std::stod(value);
    } else if (full == "train.lstm_hidden") {
      cfg.hyper.lstm_hidden = std::stoi(value);
    } else if (full == "train.cnn_filters") {
      cfg.hyper.cnn_filters = std::stoi(value);
    } else if (full == "train.cnn_heights") {
      cfg.hyper.cnn_heights.clear();
      for (const auto& v : split_csv(value)) cfg.hyper.cnn_heights.push_back(std::stoi(v));
    } else if (full == "train.embed_dim") {
      cfg.hyper.embed_dim = std::stoi(value);
    } else if (full == "train.max_epochs") {
      cfg.hyper.max_epochs = std::stoi(value);
    } else if (full == "train.patience") {
      cfg.hyper.patience = std::stoi(value);
    } else if (full == "train.micro_batch") {
      cfg.hyper.micro_batch = std::stoi(value);
    } else if (full == "eval.folds") {
      cfg.cv_folds = std::stoi(value);
    } else if (full == "eval.macro") {
      if (value == "substantive") cfg.macro_include_other = false;
      else if (value == "all") cfg.macro_include_other = true;
      else throw ConfigError("config: eval.macro must be substantive or all");
    } else {
      throw ConfigError("config: unknown key '" + full + "'");
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("config: bad value '" + value + "' for '" + full + "'");
  } catch (const std::out_of_range&) {
    throw ConfigError("config: value out of range for '" + full + "'");
  }
}

}  // namespace

std::vector<Label> RunConfig::macro_classes() const {
  if (!macro_include_other) return default_macro_classes();
  const auto a = all_labels();
  return {a.begin(), a.end()};
}

uint64_t RunConfig::digest() const {
  std::ostringstream os;
  os << "seed=" << seed << ";fmt=" << (corpus_format == CorpusFormat::Jsonl ? "jsonl" : "xmlish")
     << ";features=" << hex_digest(features.digest()) << ";folds=" << cv_folds
     << ";macro=" << macro_include_other << ";crf_l=" << crf_lambda << ";knn_k=" << knn_k
     << ";c=" << linear_c << ";iters=" << linear_max_iters << ";hyper=" << hyper.learning_rate
     << "," << hyper.batch_size << "," << hyper.dropout << "," << hyper.lstm_hidden << ","
     << hyper.cnn_filters << "," << hyper.embed_dim << "," << hyper.max_epochs << ","
     << hyper.patience << "," << hyper.micro_batch << ";heights=";
  for (int h : hyper.cnn_heights) os << h << ",";
  os << ";caps=" << caps.title_cap << "," << caps.sent_cap << "," << caps.max_sents << ","
     << caps.flat_cap;
  return fnv1a(os.str());
}

void apply_config_stream(RunConfig& cfg, std::istream& in, const std::string& origin) {
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key=value");
    set_key(cfg, section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  RunConfig cfg;
  apply_config_stream(cfg, in, path);
  return cfg;
}

void apply_config_override(RunConfig& cfg, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("config override must be section.key=value: " + assignment);
  std::string key = trim(assignment.substr(0, eq));
  const size_t dot = key.find('.');
  std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
  if (dot != std::string::npos) key = key.substr(dot + 1);
  std::istringstream dummy;
  (void)dummy;
  // reuse the same key table
  std::stringstream line;
  line << (section.empty() ? "" : "[" + section + "]\n") << key << " = "
       << trim(assignment.substr(eq + 1)) << "\n";
  apply_config_stream(cfg, line, "<override>");
}

}  // namespace secfn
