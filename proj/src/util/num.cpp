#include "pvyield/util/num.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "pvyield/errors.hpp"

namespace pvyield {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) fail(errc::io_error, "failed to format double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view token, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    fail(errc::schema_mismatch, context + ": not a number: '" + std::string(token) + "'");
  return v;
}

long parse_long(std::string_view token, const std::string& context) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    fail(errc::schema_mismatch, context + ": not an integer: '" + std::string(token) + "'");
  return v;
}

bool nearly_equal(double a, double b, double rel_tol, double abs_tol) {
  const double diff = std::fabs(a - b);
  if (diff <= abs_tol) return true;
  return diff <= rel_tol * std::max(std::fabs(a), std::fabs(b));
}

double mean(const std::vector<double>& v) {
  if (v.empty()) fail(errc::empty_input, "mean of empty vector");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stdev_population(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace pvyield
