#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "abel/cocycle.hpp"
#include "abel/euclid_plane.hpp"
#include "abel/interval_exchange.hpp"
#include "abel/torus_model.hpp"

namespace abel {

/* Config readers. All files are JSON with a "format": 1 version field.
 *
 *   exchange:  {"base": [lo, hi],
 *               "pieces": [{"left": x, "length": l, "shift": t}, ...],
 *               "forward_breaks": [...], "backward_breaks": [...],   (optional)
 *               "format": 1}
 *   cocycle:   {"iet": <exchange schema>,
 *               "cells": [{"left": x, "length": l,
 *                          "matrix": [[a, b], [c, d]]}, ...],
 *               "format": 1}
 *   torus:     {"m": .., "mu": .., "nu": .., "lambda": ..,
 *               "lean": "left" | "right", "format": 1}
 *
 * Omitting the break arrays registers every interior endpoint. Schema or
 * syntax violations throw InvalidInput. */
IntervalExchange parse_iet(const std::string& text);
IntervalCocycle parse_cocycle(const std::string& text);
TorusParams parse_torus(const std::string& text);

IntervalExchange read_iet_file(const std::string& path);
IntervalCocycle read_cocycle_file(const std::string& path);
TorusParams read_torus_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/* Deterministic JSON output value: object keys keep insertion order and
 * every double is printed with 17 significant digits, so identical data
 * serializes to identical bytes. Non-finite numbers, which standard JSON
 * cannot carry, are emitted as the strings "inf", "-inf", "nan". */
class JsonValue {
 public:
  JsonValue();                   /* null */
  explicit JsonValue(bool b);
  explicit JsonValue(double x);
  explicit JsonValue(std::int64_t n);
  explicit JsonValue(int n);
  explicit JsonValue(std::size_t n);
  explicit JsonValue(std::string s);
  explicit JsonValue(const char* s);

  static JsonValue object();
  static JsonValue array();
  static JsonValue matrix(const Mat2& m);  /* [[a, b], [c, d]] */

  /* object field (insertion order preserved); returns *this for chaining */
  JsonValue& set(const std::string& key, JsonValue value);
  /* array element */
  JsonValue& push(JsonValue value);

  std::string dump(int indent = 2) const;

 private:
  enum class Kind { null, boolean, number, integer, text, array, object };

  void render(std::string& out, int indent, int depth) const;

  Kind kind_;
  bool bool_ = false;
  double num_ = 0.0;
  std::int64_t int_ = 0;
  std::string text_;
  std::vector<JsonValue> items_;
  std::vector<std::pair<std::string, JsonValue>> fields_;
};

/* 17-significant-digit decimal form of x, the one used inside JsonValue. */
std::string format_double(double x);

/* Flat numeric table serialized as CSV with the same number formatting. */
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);

}  // namespace abel
