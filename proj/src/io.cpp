#include "oce/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oce/errors.hpp"

namespace oce {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

double parse_loss(std::string_view field, std::size_t line) {
  field = trim(field);
  double out = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (first == last || ec != std::errc{} || ptr != last || !std::isfinite(out)) {
    throw ParseError("'" + std::string(field) + "' is not a decimal number", line);
  }
  if (out < 0.0) throw ParseError("loss " + std::string(field) + " is negative", line);
  return out;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    ++line_no;
    fn(trim(line), line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

}  // namespace

std::vector<double> parse_loss_csv(std::string_view text) {
  std::vector<double> out;
  bool first_content = true;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    if (line.empty()) return;
    if (first_content && line == "loss") {
      first_content = false;
      return;
    }
    first_content = false;
    out.push_back(parse_loss(line, no));
  });
  if (out.empty()) throw ParseError("no losses found", 0);
  return out;
}

std::vector<std::vector<double>> parse_loss_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    if (line.empty()) return;
    std::vector<double> row;
    while (true) {
      const auto comma = line.find(',');
      row.push_back(parse_loss(line.substr(0, comma), no));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("row has " + std::to_string(row.size()) + " columns, expected " +
                           std::to_string(rows.front().size()),
                       no);
    }
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw ParseError("no rows found", 0);
  return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed while reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

std::vector<double> read_loss_csv(const std::filesystem::path& path) {
  try {
    return parse_loss_csv(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

std::vector<std::vector<double>> read_loss_matrix(const std::filesystem::path& path) {
  try {
    return parse_loss_matrix(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const char* where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) {
      throw DomainError(std::string("unknown field '") + key + "' in " + where);
    }
  }
}

template <class T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DomainError(std::string("config field '") + key + "': " + e.what());
  }
}

Objective parse_objective(const json& obj) {
  if (!obj.is_object()) throw DomainError("config field 'objective' must be an object");
  reject_unknown(obj, {"kind", "spec", "penalty_lambda"}, "objective");
  std::string kind;
  read_field(obj, "kind", kind);
  std::string spec;
  read_field(obj, "spec", spec);
  if (kind == "erm") return Erm{};
  if (kind == "eom" || kind == "eim") {
    if (spec.empty()) throw DomainError("objective '" + kind + "' needs a 'spec'");
    const Disutility phi = Disutility::parse(spec);
    if (kind == "eom") return Eom{phi};
    return Eim{phi};
  }
  if (kind == "svp") {
    double penalty = 0.0;
    read_field(obj, "penalty_lambda", penalty);
    return Svp{penalty};
  }
  throw DomainError("objective kind must be one of erm, eom, eim, svp");
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object", 0);
  reject_unknown(doc, {"task", "train"}, "config");

  ExperimentConfig cfg;
  if (doc.contains("task")) {
    const json& t = doc["task"];
    if (!t.is_object()) throw DomainError("config field 'task' must be an object");
    reject_unknown(t, {"n_train", "n_test", "dimension", "class_separation", "label_noise_rate",
                       "seed"},
                   "task");
    read_field(t, "n_train", cfg.task.n_train);
    read_field(t, "n_test", cfg.task.n_test);
    read_field(t, "dimension", cfg.task.dimension);
    read_field(t, "class_separation", cfg.task.class_separation);
    read_field(t, "label_noise_rate", cfg.task.label_noise_rate);
    read_field(t, "seed", cfg.task.seed);
  }
  if (doc.contains("train")) {
    const json& t = doc["train"];
    if (!t.is_object()) throw DomainError("config field 'train' must be an object");
    reject_unknown(t, {"objective", "batch_size", "epochs", "learning_rate", "loss_clip_M",
                       "init_scale", "seed"},
                   "train");
    if (t.contains("objective")) cfg.train.objective = parse_objective(t["objective"]);
    read_field(t, "batch_size", cfg.train.batch_size);
    read_field(t, "epochs", cfg.train.epochs);
    read_field(t, "learning_rate", cfg.train.learning_rate);
    read_field(t, "loss_clip_M", cfg.train.loss_clip_M);
    read_field(t, "init_scale", cfg.train.init_scale);
    read_field(t, "seed", cfg.train.seed);
  }
  validate(cfg.task, cfg.train);
  return cfg;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_text_file(path));
}

}  // namespace oce
