#ifndef ORLICZ_CONFIG_HPP
#define ORLICZ_CONFIG_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/expression.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/scalar_field.hpp"

namespace orlicz {

// Config text format (EBNF in docs/report_schema.md):
//
//   command = "solve"
//   [phi]
//   family = "double_phase"
//   p = "1.5"
//   q = "3"
//   mu = "x"
//   [grid]
//   extent = [0, 1]
//   n = 101
//   [options]
//   seed = 7
//
// `phi = {family = "power", p = "2"}` at the top level is equivalent to a
// [phi] section. Sum and scaled families list their parts as
// `children = [{...}, {...}]`.

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"check", "constants", "conjugate", "solve", "refine"};
  return names;
}

struct GridSpec {
  std::vector<double> extent;  // {a, b} or {a, b, c, d}; empty when absent
  std::size_t n = 0;

  bool present() const { return !extent.empty(); }
  int dim() const { return extent.size() == 4 ? 2 : 1; }
  Domain domain() const {
    if (!present()) return Domain::unbounded();
    return dim() == 1 ? Domain::interval(extent[0], extent[1])
                      : Domain::rectangle(extent[0], extent[1], extent[2], extent[3]);
  }
  bool operator==(const GridSpec&) const = default;
};

struct RunOptions {
  std::uint64_t seed = 0;
  double tol = 0.0;  // 0: the solver default
  std::string method = "newton";
  std::string variant = "A";
  std::string f = "1";
  std::size_t trials = 1000;
  std::size_t resolution = 1000;  // best-constant grid per axis
  std::vector<double> r{1.2, 1.5, 2.0, 3.0, 4.0, 6.0};
  double s_min = 1e-2;
  double s_max = 1e2;
  std::size_t s_count = 41;
  std::vector<std::size_t> n_sequence;
  bool operator==(const RunOptions&) const = default;
};

struct RunConfig {
  std::string command;
  std::optional<FamilyDescriptor> phi;
  GridSpec grid;
  RunOptions options;
  bool operator==(const RunConfig&) const = default;
};

namespace config_detail {

struct Value {
  enum class Kind { String, Number, Bool, Array, Table } kind = Kind::String;
  std::string text;  // string contents, or the number's source text
  double number = 0.0;
  bool boolean = false;
  std::vector<Value> items;      // array elements or table values
  std::vector<std::string> keys;  // table keys, parallel to items
  std::size_t line = 0, column = 0;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  struct Entry {
    std::string section;
    std::string key;
    Value value;
    std::size_t line, column;
  };

  std::vector<Entry> read_all() {
    std::vector<Entry> out;
    std::string section;
    for (;;) {
      skip_blank(true);
      if (eof()) break;
      if (peek() == '[') {
        get();
        skip_blank(false);
        section = ident();
        skip_blank(false);
        expect(']');
        end_of_line();
        continue;
      }
      const std::size_t l = line_, c = col_;
      std::string key = ident();
      skip_blank(false);
      expect('=');
      skip_blank(false);
      Value v = value();
      end_of_line();
      out.push_back({section, std::move(key), std::move(v), l, c});
    }
    return out;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  char get() {
    const char ch = s_[pos_++];
    if (ch == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return ch;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, col_); }

  void skip_blank(bool newlines) {
    while (!eof()) {
      const char ch = peek();
      if (ch == '#') {
        while (!eof() && peek() != '\n') get();
      } else if (ch == ' ' || ch == '\t' || ch == '\r' || (newlines && ch == '\n')) {
        get();
      } else {
        break;
      }
    }
  }
  void end_of_line() {
    skip_blank(false);
    if (!eof() && peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value");
  }
  void expect(char ch) {
    if (peek() != ch) fail(std::string("expected '") + ch + "'");
    get();
  }
  std::string ident() {
    std::string out;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) out += get();
    if (out.empty()) fail("expected a key");
    return out;
  }

  Value value() {
    Value v;
    v.line = line_;
    v.column = col_;
    const char ch = peek();
    if (ch == '"') {
      get();
      v.kind = Value::Kind::String;
      while (peek() != '"') {
        if (eof() || peek() == '\n') fail("unterminated string");
        char c = get();
        if (c == '\\') {
          if (eof()) fail("unterminated string");
          c = get();
          if (c != '"' && c != '\\') fail("unknown escape");
        }
        v.text += c;
      }
      get();
    } else if (ch == '[') {
      get();
      v.kind = Value::Kind::Array;
      skip_blank(true);
      while (peek() != ']') {
        v.items.push_back(value());
        skip_blank(true);
        if (peek() == ',') {
          get();
          skip_blank(true);
        } else if (peek() != ']') {
          fail("expected ',' or ']'");
        }
      }
      get();
    } else if (ch == '{') {
      get();
      v.kind = Value::Kind::Table;
      skip_blank(true);
      while (peek() != '}') {
        std::string key = ident();
        skip_blank(true);
        expect('=');
        skip_blank(true);
        if (std::find(v.keys.begin(), v.keys.end(), key) != v.keys.end()) fail("duplicate key '" + key + "'");
        v.keys.push_back(std::move(key));
        v.items.push_back(value());
        skip_blank(true);
        if (peek() == ',') {
          get();
          skip_blank(true);
        } else if (peek() != '}') {
          fail("expected ',' or '}'");
        }
      }
      get();
    } else if (std::isalpha(static_cast<unsigned char>(ch))) {
      const std::string word = ident();
      if (word != "true" && word != "false") {
        line_ = v.line;
        col_ = v.column;
        fail("unknown bare word '" + word + "'");
      }
      v.kind = Value::Kind::Bool;
      v.boolean = word == "true";
    } else {
      v.kind = Value::Kind::Number;
      while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || std::string_view("+-.eE").find(peek()) !=
                                                                                 std::string_view::npos))
        v.text += get();
      const char* b = v.text.data();
      const char* e = b + v.text.size();
      auto [ptr, ec] = std::from_chars(b, e, v.number);
      if (v.text.empty() || ec != std::errc{} || ptr != e) {
        line_ = v.line;
        col_ = v.column;
        fail(v.text.empty() ? "expected a value" : "malformed number '" + v.text + "'");
      }
    }
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
};

[[noreturn]] inline void type_error(const Value& v, const std::string& key, const char* want) {
  throw ParseError("'" + key + "' must be " + want, v.line, v.column);
}

inline const std::string& as_string(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::String) type_error(v, key, "a string");
  return v.text;
}
inline double as_number(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Number) type_error(v, key, "a number");
  return v.number;
}
inline bool as_bool(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Bool) type_error(v, key, "true or false");
  return v.boolean;
}
inline std::uint64_t as_count(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Number) type_error(v, key, "a nonnegative integer");
  std::uint64_t out = 0;
  const char* b = v.text.data();
  const char* e = b + v.text.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  if (ec != std::errc{} || ptr != e) type_error(v, key, "a nonnegative integer");
  return out;
}
inline const std::vector<Value>& as_array(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Array) type_error(v, key, "an array");
  return v.items;
}

// Expression strings are parsed here so errors point into the config text.
inline std::string expression_field(const Value& v, const std::string& key) {
  const std::string& s = as_string(v, key);
  try {
    Expression::parse(s);
  } catch (const ParseError& e) {
    throw ParseError("in '" + key + "': " + e.message(), v.line, v.column + e.column());
  }
  return s;
}

inline FamilyDescriptor descriptor_entry(FamilyDescriptor d, const std::string& key, const Value& v);

inline FamilyDescriptor descriptor_table(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Table) type_error(v, key, "a table");
  FamilyDescriptor d;
  d.family = Family::Power;
  bool has_family = false;
  for (std::size_t i = 0; i < v.keys.size(); ++i) {
    if (v.keys[i] == "family") has_family = true;
    d = descriptor_entry(std::move(d), v.keys[i], v.items[i]);
  }
  if (!has_family) throw ParseError("'" + key + "' needs a family", v.line, v.column);
  return d;
}

inline FamilyDescriptor descriptor_entry(FamilyDescriptor d, const std::string& key, const Value& v) {
  if (key == "family") {
    const std::string& name = as_string(v, key);
    const auto f = family_from_name(name);
    if (!f) throw ParseError("unknown family '" + name + "'", v.line, v.column);
    d.family = *f;
  } else if (key == "p") {
    d.p = expression_field(v, key);
  } else if (key == "q") {
    d.q = expression_field(v, key);
  } else if (key == "mu") {
    d.mu = expression_field(v, key);
  } else if (key == "normalized") {
    d.normalized = as_bool(v, key);
  } else if (key == "scale") {
    d.scale = as_number(v, key);
  } else if (key == "children") {
    d.children.clear();
    for (const Value& c : as_array(v, key)) d.children.push_back(descriptor_table(c, "children"));
  } else {
    throw ParseError("unknown phi key '" + key + "'", v.line, v.column);
  }
  return d;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string inline_descriptor(const FamilyDescriptor& d) {
  std::string out = "{family = " + quote(std::string(family_name(d.family)));
  if (!d.p.empty()) out += ", p = " + quote(d.p);
  if (!d.q.empty()) out += ", q = " + quote(d.q);
  if (!d.mu.empty()) out += ", mu = " + quote(d.mu);
  if (d.normalized) out += ", normalized = true";
  if (d.scale != 1.0) out += ", scale = " + format_double(d.scale);
  if (!d.children.empty()) {
    out += ", children = [";
    for (std::size_t i = 0; i < d.children.size(); ++i) out += (i ? ", " : "") + inline_descriptor(d.children[i]);
    out += "]";
  }
  return out + "}";
}

}  // namespace config_detail

inline std::optional<PhiFunction> validate_config(const RunConfig& cfg);

/// Parses and validates a run config. A nonempty `command` replaces the one in
/// the text. Throws ParseError (with line and column) for malformed text or
/// unknown keys, ValidationError for configs that parse but violate an
/// invariant (the message names each one).
inline RunConfig parse_config(std::string_view text, std::string_view command = {}) {
  using namespace config_detail;
  RunConfig cfg;
  std::set<std::string> seen;
  for (const auto& e : Reader(text).read_all()) {
    const std::string full = e.section.empty() ? e.key : e.section + "." + e.key;
    if (!seen.insert(full).second) throw ParseError("duplicate key '" + full + "'", e.line, e.column);
    const Value& v = e.value;
    if (e.section.empty()) {
      if (e.key == "command") {
        cfg.command = as_string(v, e.key);
      } else if (e.key == "phi") {
        if (seen.count("phi.family")) throw ParseError("phi given twice", e.line, e.column);
        cfg.phi = descriptor_table(v, e.key);
      } else {
        throw ParseError("unknown key '" + e.key + "'", e.line, e.column);
      }
    } else if (e.section == "phi") {
      if (seen.count("phi")) throw ParseError("phi given twice", e.line, e.column);
      if (!cfg.phi) {
        cfg.phi.emplace();
        cfg.phi->family = Family::Power;
      }
      cfg.phi = descriptor_entry(std::move(*cfg.phi), e.key, v);
    } else if (e.section == "grid") {
      if (e.key == "extent") {
        cfg.grid.extent.clear();
        for (const Value& x : as_array(v, e.key)) cfg.grid.extent.push_back(as_number(x, e.key));
      } else if (e.key == "n") {
        cfg.grid.n = as_count(v, e.key);
      } else {
        throw ParseError("unknown grid key '" + e.key + "'", e.line, e.column);
      }
    } else if (e.section == "options") {
      RunOptions& o = cfg.options;
      if (e.key == "seed") o.seed = as_count(v, e.key);
      else if (e.key == "tol") o.tol = as_number(v, e.key);
      else if (e.key == "method") o.method = as_string(v, e.key);
      else if (e.key == "variant") o.variant = as_string(v, e.key);
      else if (e.key == "f") o.f = expression_field(v, e.key);
      else if (e.key == "trials") o.trials = as_count(v, e.key);
      else if (e.key == "resolution") o.resolution = as_count(v, e.key);
      else if (e.key == "s_min") o.s_min = as_number(v, e.key);
      else if (e.key == "s_max") o.s_max = as_number(v, e.key);
      else if (e.key == "s_count") o.s_count = as_count(v, e.key);
      else if (e.key == "r") {
        o.r.clear();
        for (const Value& x : as_array(v, e.key)) o.r.push_back(as_number(x, e.key));
      } else if (e.key == "n_sequence") {
        o.n_sequence.clear();
        for (const Value& x : as_array(v, e.key)) o.n_sequence.push_back(as_count(x, e.key));
      } else {
        throw ParseError("unknown options key '" + e.key + "'", e.line, e.column);
      }
    } else {
      throw ParseError("unknown section '" + e.section + "'", e.line, e.column);
    }
  }
  if (!command.empty()) cfg.command = std::string(command);
  validate_config(cfg);
  return cfg;
}

/// Checks the invariants parse_config cannot see from syntax alone; returns
/// the phi built on the grid extent when one is configured.
inline std::optional<PhiFunction> validate_config(const RunConfig& cfg) {
  std::vector<std::string> v;
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), cfg.command) == names.end())
    v.push_back("command must be one of check, constants, conjugate, solve, refine (got '" + cfg.command + "')");
  if (cfg.grid.present()) {
    const auto& x = cfg.grid.extent;
    if (x.size() != 2 && x.size() != 4) v.push_back("grid.extent needs 2 or 4 numbers");
    else if (!(x[0] < x[1]) || (x.size() == 4 && !(x[2] < x[3]))) v.push_back("grid.extent must be increasing");
  }
  const bool needs_grid = cfg.command == "solve" || cfg.command == "refine";
  if (needs_grid && !cfg.grid.present()) v.push_back(cfg.command + " needs grid.extent");
  if (cfg.command == "solve" && cfg.grid.n < 3) v.push_back("solve needs grid.n >= 3");
  if (cfg.command == "refine") {
    if (cfg.options.n_sequence.empty()) v.push_back("refine needs options.n_sequence");
    for (std::size_t n : cfg.options.n_sequence)
      if (n < 3) v.push_back("options.n_sequence entries must be >= 3");
  }
  if (cfg.command != "constants" && !cfg.phi) v.push_back(cfg.command + " needs a phi");
  const RunOptions& o = cfg.options;
  if (o.method != "newton" && o.method != "descent") v.push_back("options.method must be newton or descent");
  if (o.variant != "A" && o.variant != "B") v.push_back("options.variant must be A or B");
  if (o.tol < 0.0) v.push_back("options.tol must be nonnegative");
  if (!(o.s_min > 0.0 && o.s_max > o.s_min)) v.push_back("options.s_min/s_max must satisfy 0 < s_min < s_max");
  if (o.s_count < 2) v.push_back("options.s_count must be >= 2");
  if (o.resolution < 2) v.push_back("options.resolution must be >= 2");
  for (double r : o.r)
    if (!(r > 1.0)) v.push_back("options.r entries must exceed 1");
  if (!v.empty()) throw ValidationError(v);

  std::optional<PhiFunction> phi;
  if (cfg.phi) phi = make_family(*cfg.phi, cfg.grid.domain());
  if (cfg.grid.present()) ScalarField::parse(o.f, cfg.grid.domain());
  return phi;
}

/// Text that parses back to an equal RunConfig.
inline std::string serialize(const RunConfig& cfg) {
  using config_detail::quote;
  std::string out;
  if (!cfg.command.empty()) out += "command = " + quote(cfg.command) + "\n";
  if (cfg.phi) out += "phi = " + config_detail::inline_descriptor(*cfg.phi) + "\n";
  if (cfg.grid.present() || cfg.grid.n != 0) {
    out += "\n[grid]\n";
    if (cfg.grid.present()) {
      out += "extent = [";
      for (std::size_t i = 0; i < cfg.grid.extent.size(); ++i)
        out += (i ? ", " : "") + format_double(cfg.grid.extent[i]);
      out += "]\n";
    }
    if (cfg.grid.n != 0) out += "n = " + std::to_string(cfg.grid.n) + "\n";
  }
  const RunOptions& o = cfg.options;
  out += "\n[options]\n";
  out += "seed = " + std::to_string(o.seed) + "\n";
  out += "tol = " + format_double(o.tol) + "\n";
  out += "method = " + quote(o.method) + "\n";
  out += "variant = " + quote(o.variant) + "\n";
  out += "f = " + quote(o.f) + "\n";
  out += "trials = " + std::to_string(o.trials) + "\n";
  out += "resolution = " + std::to_string(o.resolution) + "\n";
  out += "r = [";
  for (std::size_t i = 0; i < o.r.size(); ++i) out += (i ? ", " : "") + format_double(o.r[i]);
  out += "]\n";
  out += "s_min = " + format_double(o.s_min) + "\n";
  out += "s_max = " + format_double(o.s_max) + "\n";
  out += "s_count = " + std::to_string(o.s_count) + "\n";
  out += "n_sequence = [";
  for (std::size_t i = 0; i < o.n_sequence.size(); ++i) out += (i ? ", " : "") + std::to_string(o.n_sequence[i]);
  out += "]\n";
  return out;
}

}  // namespace orlicz

#endif  // ORLICZ_CONFIG_HPP
