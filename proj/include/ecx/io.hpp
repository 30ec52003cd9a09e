#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ecx/common.hpp"
#include "ecx/model.hpp"

namespace ecx {

// Shortest text that round-trips the exact double: printf "%.17g".
std::string format_double(double v);

struct CsvMatrix {
  Mat values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
};

// Matrix CSV with a header row of column ids and a leading id column.
void write_matrix_csv(const std::string& path, const Mat& m,
                      const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& col_ids);
CsvMatrix read_matrix_csv(const std::string& path);

// Column-oriented table CSV ("id,col1,col2,..."), one row per id.
void write_table_csv(const std::string& path,
                     const std::vector<std::string>& ids,
                     const std::vector<std::string>& col_names,
                     const std::vector<Vec>& columns);

// Minimal JSON emitter with deterministic key order and 17-digit floats.
// Non-finite numbers are emitted as strings ("nan", "inf", "-inf").
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array(const std::string& key = "");
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v);
  JsonWriter& value(const Vec& v);
  JsonWriter& kv(const std::string& k, double v);
  JsonWriter& kv(const std::string& k, int v);
  JsonWriter& kv(const std::string& k, std::int64_t v);
  JsonWriter& kv(const std::string& k, std::uint64_t v);
  JsonWriter& kv(const std::string& k, bool v);
  JsonWriter& kv(const std::string& k, const std::string& v);
  JsonWriter& kv(const std::string& k, const char* v);
  JsonWriter& kv(const std::string& k, const Vec& v);

  std::string str() const { return out_; }
  void write(const std::string& path) const;

 private:
  void comma();
  void indent();
  std::string out_;
  std::vector<char> stack_;       // '{' or '['
  std::vector<bool> has_items_;
  bool pending_key_ = false;
};

// key = value configuration text; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

// GeneratorSpec <-> config keys (kind, n_economies, n_activities,
// n_capabilities, seed, alpha, scale, profile_halfwidth, profile_plateau,
// blocks).
GeneratorSpec spec_from_config(const std::map<std::string, std::string>& cfg,
                               const GeneratorSpec& defaults = {});
std::string config_from_spec(const GeneratorSpec& spec);

void ensure_directory(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ecx
