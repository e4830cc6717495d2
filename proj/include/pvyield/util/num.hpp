#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pvyield {

// Shortest decimal form that parses back to the same double. Used for every
// number written to CSV or JSON so that serialized artifacts are reproducible
// bit for bit.
std::string format_double(double v);

// Strict parsers: the whole token must be consumed, else errc::schema_mismatch
// with `context` in the message.
double parse_double(std::string_view token, const std::string& context);
long parse_long(std::string_view token, const std::string& context);

bool nearly_equal(double a, double b, double rel_tol, double abs_tol = 0.0);

double mean(const std::vector<double>& v);
// Population standard deviation (divides by n).
double stdev_population(const std::vector<double>& v);

}  // namespace pvyield
