#include "ecx/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ecx {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_directory(const std::string& path) {
  if (!path.empty()) std::filesystem::create_directories(path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << text;
}

void write_matrix_csv(const std::string& path, const Mat& m,
                      const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& col_ids) {
  if (static_cast<int>(row_ids.size()) != m.rows() ||
      static_cast<int>(col_ids.size()) != m.cols()) {
    throw ValidationError("write_matrix_csv: id/matrix shape mismatch");
  }
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 12 + 64);
  out += "id";
  for (const auto& c : col_ids) {
    out += ',';
    out += c;
  }
  out += '\n';
  for (int i = 0; i < m.rows(); ++i) {
    out += row_ids[static_cast<std::size_t>(i)];
    for (int j = 0; j < m.cols(); ++j) {
      out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

CsvMatrix read_matrix_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty CSV: " + path);
  auto header = split_csv_line(line);
  if (header.size() < 2) throw ValidationError("malformed CSV header: " + path);

  CsvMatrix out;
  out.col_ids.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ValidationError("ragged CSV row in " + path);
    }
    out.row_ids.push_back(fields[0]);
    std::vector<double> row;
    row.reserve(fields.size() - 1);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      row.push_back(std::strtod(fields[j].c_str(), nullptr));
    }
    rows.push_back(std::move(row));
  }
  out.values.resize(static_cast<int>(rows.size()),
                    static_cast<int>(out.col_ids.size()));
  for (int i = 0; i < out.values.rows(); ++i) {
    for (int j = 0; j < out.values.cols(); ++j) {
      out.values(i, j) = rows[static_cast<std::size_t>(i)]
                             [static_cast<std::size_t>(j)];
    }
  }
  return out;
}

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& ids,
                     const std::vector<std::string>& col_names,
                     const std::vector<Vec>& columns) {
  if (col_names.size() != columns.size()) {
    throw ValidationError("write_table_csv: column name/count mismatch");
  }
  for (const auto& c : columns) {
    if (static_cast<std::size_t>(c.size()) != ids.size()) {
      throw ValidationError("write_table_csv: column length mismatch");
    }
  }
  std::string out = "id";
  for (const auto& n : col_names) {
    out += ',';
    out += n;
  }
  out += '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    for (const auto& c : columns) {
      out += ',';
      out += format_double(c(static_cast<int>(i)));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

// --- JsonWriter --------------------------------------------------------------

void JsonWriter::comma() {
  if (!has_items_.empty() && has_items_.back() && !pending_key_) out_ += ',';
  if (!has_items_.empty() && !pending_key_) has_items_.back() = true;
}

void JsonWriter::indent() {
  if (pending_key_) return;
  if (!out_.empty()) out_ += '\n';
  out_.append(stack_.size() * 2, ' ');
}

JsonWriter& JsonWriter::begin_object() {
  comma();
  indent();
  pending_key_ = false;
  out_ += '{';
  stack_.push_back('{');
  has_items_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  bool had = has_items_.back();
  stack_.pop_back();
  has_items_.pop_back();
  if (had) {
    out_ += '\n';
    out_.append(stack_.size() * 2, ' ');
  }
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array(const std::string& k) {
  if (!k.empty()) key(k);
  comma();
  indent();
  pending_key_ = false;
  out_ += '[';
  stack_.push_back('[');
  has_items_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  bool had = has_items_.back();
  stack_.pop_back();
  has_items_.pop_back();
  if (had) {
    out_ += '\n';
    out_.append(stack_.size() * 2, ' ');
  }
  out_ += ']';
  return *this;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

std::string json_number(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  return format_double(v);
}

}  // namespace

JsonWriter& JsonWriter::key(const std::string& k) {
  comma();
  indent();
  out_ += '"';
  out_ += json_escape(k);
  out_ += "\": ";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  comma();
  indent();
  out_ += json_number(v);
  pending_key_ = false;
  return *this;
}

JsonWriter& JsonWriter::value(int v) { return value(static_cast<std::int64_t>(v)); }

JsonWriter& JsonWriter::value(std::int64_t v) {
  comma();
  indent();
  out_ += std::to_string(v);
  pending_key_ = false;
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  comma();
  indent();
  out_ += std::to_string(v);
  pending_key_ = false;
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  comma();
  indent();
  out_ += v ? "true" : "false";
  pending_key_ = false;
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  comma();
  indent();
  out_ += '"';
  out_ += json_escape(v);
  out_ += '"';
  pending_key_ = false;
  return *this;
}

JsonWriter& JsonWriter::value(const char* v) { return value(std::string(v)); }

JsonWriter& JsonWriter::value(const Vec& v) {
  begin_array();
  for (int i = 0; i < v.size(); ++i) value(v(i));
  return end_array();
}

JsonWriter& JsonWriter::kv(const std::string& k, double v) { return key(k).value(v); }
JsonWriter& JsonWriter::kv(const std::string& k, int v) { return key(k).value(v); }
JsonWriter& JsonWriter::kv(const std::string& k, std::int64_t v) { return key(k).value(v); }
JsonWriter& JsonWriter::kv(const std::string& k, std::uint64_t v) { return key(k).value(v); }
JsonWriter& JsonWriter::kv(const std::string& k, bool v) { return key(k).value(v); }
JsonWriter& JsonWriter::kv(const std::string& k, const std::string& v) { return key(k).value(v); }
JsonWriter& JsonWriter::kv(const std::string& k, const char* v) { return key(k).value(v); }
JsonWriter& JsonWriter::kv(const std::string& k, const Vec& v) { return key(k).value(v); }

void JsonWriter::write(const std::string& path) const {
  write_text_file(path, out_ + "\n");
}

// --- config ------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": expected key = value");
    }
    cfg[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

namespace {

int cfg_int(const std::map<std::string, std::string>& cfg,
            const std::string& k, int dflt) {
  auto it = cfg.find(k);
  if (it == cfg.end()) return dflt;
  try {
    return std::stoi(it->second);
  } catch (...) {
    throw ValidationError("config key '" + k + "': not an integer");
  }
}

double cfg_double(const std::map<std::string, std::string>& cfg,
                  const std::string& k, double dflt) {
  auto it = cfg.find(k);
  if (it == cfg.end()) return dflt;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw ValidationError("config key '" + k + "': not a number");
  }
}

std::uint64_t cfg_u64(const std::map<std::string, std::string>& cfg,
                      const std::string& k, std::uint64_t dflt) {
  auto it = cfg.find(k);
  if (it == cfg.end()) return dflt;
  try {
    return std::stoull(it->second);
  } catch (...) {
    throw ValidationError("config key '" + k + "': not an integer");
  }
}

}  // namespace

GeneratorSpec spec_from_config(const std::map<std::string, std::string>& cfg,
                               const GeneratorSpec& defaults) {
  GeneratorSpec s = defaults;
  if (auto it = cfg.find("kind"); it != cfg.end()) {
    auto k = generator_kind_from_name(it->second);
    if (!k) throw ValidationError("unknown generator kind: " + it->second);
    s.kind = *k;
  }
  s.n_economies = cfg_int(cfg, "n_economies", s.n_economies);
  s.n_activities = cfg_int(cfg, "n_activities", s.n_activities);
  s.n_capabilities = cfg_int(cfg, "n_capabilities", s.n_capabilities);
  s.seed = cfg_u64(cfg, "seed", s.seed);
  s.alpha = cfg_double(cfg, "alpha", s.alpha);
  s.scale = cfg_double(cfg, "scale", s.scale);
  s.profile_halfwidth = cfg_int(cfg, "profile_halfwidth", s.profile_halfwidth);
  s.profile_plateau = cfg_int(cfg, "profile_plateau", s.profile_plateau);
  s.blocks = cfg_int(cfg, "blocks", s.blocks);
  return s;
}

std::string config_from_spec(const GeneratorSpec& s) {
  std::string out;
  out += "kind = " + std::string(generator_kind_name(s.kind)) + "\n";
  out += "n_economies = " + std::to_string(s.n_economies) + "\n";
  out += "n_activities = " + std::to_string(s.n_activities) + "\n";
  out += "n_capabilities = " + std::to_string(s.n_capabilities) + "\n";
  out += "seed = " + std::to_string(s.seed) + "\n";
  out += "alpha = " + format_double(s.alpha) + "\n";
  out += "scale = " + format_double(s.scale) + "\n";
  out += "profile_halfwidth = " + std::to_string(s.profile_halfwidth) + "\n";
  out += "profile_plateau = " + std::to_string(s.profile_plateau) + "\n";
  out += "blocks = " + std::to_string(s.blocks) + "\n";
  return out;
}

}  // namespace ecx
