#include "abel/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "abel/errors.hpp"
#include "json.hpp"

namespace abel {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: JSON syntax error: ") + e.what());
  }
}

double get_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw InvalidInput("config: missing numeric field \"" + key + "\"");
  return j[key].get<double>();
}

void check_format(const json& j) {
  if (!j.is_object()) throw InvalidInput("config: top level must be an object");
  if (!j.contains("format") || !j["format"].is_number_integer() ||
      j["format"].get<int>() != 1)
    throw InvalidInput("config: expected \"format\": 1");
}

std::vector<double> get_break_list(const json& j, const std::string& key) {
  std::vector<double> out;
  if (!j[key].is_array())
    throw InvalidInput("config: \"" + key + "\" must be an array");
  for (const json& v : j[key]) {
    if (!v.is_number())
      throw InvalidInput("config: \"" + key + "\" entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

IntervalExchange iet_from_json(const json& j) {
  if (!j.is_object() || !j.contains("base") || !j["base"].is_array() ||
      j["base"].size() != 2)
    throw InvalidInput("config: exchange needs \"base\": [lo, hi]");
  const double lo = j["base"][0].get<double>();
  const double hi = j["base"][1].get<double>();

  if (!j.contains("pieces") || !j["pieces"].is_array() || j["pieces"].empty())
    throw InvalidInput("config: exchange needs a non-empty \"pieces\" array");
  std::vector<Piece> pieces;
  for (const json& p : j["pieces"])
    pieces.push_back(
        Piece{get_number(p, "left"), get_number(p, "length"), get_number(p, "shift")});

  const bool has_fwd = j.contains("forward_breaks");
  const bool has_bwd = j.contains("backward_breaks");
  if (has_fwd || has_bwd) {
    std::vector<double> fwd =
        has_fwd ? get_break_list(j, "forward_breaks") : std::vector<double>{};
    std::vector<double> bwd =
        has_bwd ? get_break_list(j, "backward_breaks") : std::vector<double>{};
    return IntervalExchange(lo, hi, std::move(pieces), std::move(fwd),
                            std::move(bwd));
  }
  return IntervalExchange(lo, hi, std::move(pieces));
}

Mat2 matrix_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() ||
      j[0].size() != 2 || j[1].size() != 2)
    throw InvalidInput("config: \"matrix\" must be [[a, b], [c, d]]");
  return Mat2{j[0][0].get<double>(), j[0][1].get<double>(),
              j[1][0].get<double>(), j[1][1].get<double>()};
}

}  // namespace

IntervalExchange parse_iet(const std::string& text) {
  const json j = parse_json(text);
  check_format(j);
  return iet_from_json(j);
}

IntervalCocycle parse_cocycle(const std::string& text) {
  const json j = parse_json(text);
  check_format(j);
  if (!j.contains("iet")) throw InvalidInput("config: cocycle needs \"iet\"");
  IntervalExchange iet = iet_from_json(j["iet"]);

  if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty())
    throw InvalidInput("config: cocycle needs a non-empty \"cells\" array");
  std::vector<Cell> cells;
  for (const json& c : j["cells"]) {
    if (!c.contains("matrix"))
      throw InvalidInput("config: every cell needs a \"matrix\"");
    cells.push_back(Cell{get_number(c, "left"), get_number(c, "length"),
                         matrix_from_json(c["matrix"])});
  }
  return IntervalCocycle(std::move(iet), std::move(cells));
}

TorusParams parse_torus(const std::string& text) {
  const json j = parse_json(text);
  check_format(j);
  TorusParams params;
  params.m = get_number(j, "m");
  params.mu = get_number(j, "mu");
  params.nu = get_number(j, "nu");
  params.lambda = get_number(j, "lambda");
  if (!j.contains("lean") || !j["lean"].is_string())
    throw InvalidInput("config: torus needs \"lean\": \"left\" or \"right\"");
  const std::string lean = j["lean"].get<std::string>();
  if (lean == "left")
    params.lean = Lean::left;
  else if (lean == "right")
    params.lean = Lean::right;
  else
    throw InvalidInput("config: unknown lean \"" + lean + "\"");
  return params;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write file: " + path);
  out << content;
  if (!out) throw InvalidInput("write failed: " + path);
}

IntervalExchange read_iet_file(const std::string& path) {
  return parse_iet(read_text_file(path));
}

IntervalCocycle read_cocycle_file(const std::string& path) {
  return parse_cocycle(read_text_file(path));
}

TorusParams read_torus_file(const std::string& path) {
  return parse_torus(read_text_file(path));
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

JsonValue::JsonValue() : kind_(Kind::null) {}
JsonValue::JsonValue(bool b) : kind_(Kind::boolean), bool_(b) {}
JsonValue::JsonValue(double x) : kind_(Kind::number), num_(x) {}
JsonValue::JsonValue(std::int64_t n) : kind_(Kind::integer), int_(n) {}
JsonValue::JsonValue(int n) : kind_(Kind::integer), int_(n) {}
JsonValue::JsonValue(std::size_t n)
    : kind_(Kind::integer), int_(static_cast<std::int64_t>(n)) {}
JsonValue::JsonValue(std::string s) : kind_(Kind::text), text_(std::move(s)) {}
JsonValue::JsonValue(const char* s) : kind_(Kind::text), text_(s) {}

JsonValue JsonValue::object() {
  JsonValue v;
  v.kind_ = Kind::object;
  return v;
}

JsonValue JsonValue::array() {
  JsonValue v;
  v.kind_ = Kind::array;
  return v;
}

JsonValue JsonValue::matrix(const Mat2& m) {
  JsonValue rows = array();
  rows.push(array().push(JsonValue(m.a)).push(JsonValue(m.b)));
  rows.push(array().push(JsonValue(m.c)).push(JsonValue(m.d)));
  return rows;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue value) {
  if (kind_ != Kind::object)
    throw InvalidInput("json writer: set() on a non-object");
  fields_.emplace_back(key, std::move(value));
  return *this;
}

JsonValue& JsonValue::push(JsonValue value) {
  if (kind_ != Kind::array)
    throw InvalidInput("json writer: push() on a non-array");
  items_.push_back(std::move(value));
  return *this;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

}  // namespace

void JsonValue::render(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (kind_) {
    case Kind::null: out += "null"; break;
    case Kind::boolean: out += bool_ ? "true" : "false"; break;
    case Kind::integer: out += std::to_string(int_); break;
    case Kind::number: {
      const std::string s = format_double(num_);
      /* non-finite values have no JSON literal; ship them as strings */
      if (std::isfinite(num_)) out += s;
      else escape_into(out, s);
      break;
    }
    case Kind::text: escape_into(out, text_); break;
    case Kind::array: {
      if (items_.empty()) { out += "[]"; break; }
      out += "[\n";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        out += pad;
        items_[i].render(out, indent, depth + 1);
        if (i + 1 < items_.size()) out += ',';
        out += '\n';
      }
      out += close_pad + "]";
      break;
    }
    case Kind::object: {
      if (fields_.empty()) { out += "{}"; break; }
      out += "{\n";
      for (std::size_t i = 0; i < fields_.size(); ++i) {
        out += pad;
        escape_into(out, fields_[i].first);
        out += ": ";
        fields_[i].second.render(out, indent, depth + 1);
        if (i + 1 < fields_.size()) out += ',';
        out += '\n';
      }
      out += close_pad + "}";
      break;
    }
  }
}

std::string JsonValue::dump(int indent) const {
  std::string out;
  render(out, indent, 0);
  out += '\n';
  return out;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += table.columns[i];
    out += i + 1 < table.columns.size() ? "," : "";
  }
  out += '\n';
  for (const std::vector<double>& row : table.rows) {
    if (row.size() != table.columns.size())
      throw InvalidInput("csv: row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += format_double(row[i]);
      out += i + 1 < row.size() ? "," : "";
    }
    out += '\n';
  }
  return out;
}

}  // namespace abel
