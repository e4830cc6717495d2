#pragma once

#include <stdexcept>
#include <string>

namespace pvyield {

// Failure categories surfaced by the library. The CLI maps these onto exit
// codes, so every throw site picks the category deliberately.
enum class errc {
  // input files and schemas
  io_error,
  schema_mismatch,
  range_violation,
  missing_month,
  duplicate_record,
  bad_config,
  // geometry / numeric domains
  invalid_range,
  out_of_range,
  invalid_tilt,
  // clustering
  degenerate_dimension,
  too_few_points,
  // training
  too_few_rows,
  non_finite_objective,
  // homogenization
  incomplete_coverage,
  non_positive_yield,
  too_few_sites,
  // sampling
  not_enough_sites,
  missing_source,
  duplicate_key,
  // evaluation
  empty_input,
  zero_reference,
  misaligned_grids,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const { return code_; }

  // True for defects in user-supplied inputs (files, schemas, config values),
  // as opposed to failures arising while computing.
  bool is_validation() const;

 private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& message);

}  // namespace pvyield
