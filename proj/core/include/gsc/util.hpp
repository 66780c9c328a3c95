#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gsc {

// Dense row-major matrix of doubles. Plain storage, no algebra.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
  bool empty() const { return a.empty(); }
  std::span<const double> row(std::size_t r) const { return {a.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {a.data() + r * cols, cols}; }
};

// Fixed-order pairwise summation. The result depends only on the element
// order, never on thread count, so parallel producers + this reducer give
// reproducible totals.
double pairwise_sum(std::span<const double> v);

double mean(std::span<const double> v);
// Sample standard deviation (ddof = 1); 0 for n < 2.
double sample_stddev(std::span<const double> v);

// FNV-1a 64-bit hash, used to fingerprint configs in reports.
std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

// Shortest round-trip decimal formatting for doubles (CSV determinism).
std::string format_double(double v);

// Minimal `key = value` config file: one pair per line, '#' comments,
// later keys override earlier ones. Values keep internal whitespace.
class KeyValues {
 public:
  static KeyValues parse_file(const std::string& path);
  static KeyValues parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key) const;           // throws ConfigError
  double get_num_or(const std::string& key, double fallback) const;
  long get_int_or(const std::string& key, long fallback) const;
  std::vector<double> get_num_list(const std::string& key) const;  // whitespace/comma separated

  void set(const std::string& key, const std::string& value);
  // Canonical "k=v\n" dump with sorted keys; input to fnv1a64.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> kv_;
};

std::vector<double> parse_number_list(const std::string& text);

}  // namespace gsc
