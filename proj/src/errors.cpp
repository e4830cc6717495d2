#include "pvyield/errors.hpp"

namespace pvyield {

const char* errc_name(errc code) {
  switch (code) {
    case errc::io_error: return "io_error";
    case errc::schema_mismatch: return "schema_mismatch";
    case errc::range_violation: return "range_violation";
    case errc::missing_month: return "missing_month";
    case errc::duplicate_record: return "duplicate_record";
    case errc::bad_config: return "bad_config";
    case errc::invalid_range: return "invalid_range";
    case errc::out_of_range: return "out_of_range";
    case errc::invalid_tilt: return "invalid_tilt";
    case errc::degenerate_dimension: return "degenerate_dimension";
    case errc::too_few_points: return "too_few_points";
    case errc::too_few_rows: return "too_few_rows";
    case errc::non_finite_objective: return "non_finite_objective";
    case errc::incomplete_coverage: return "incomplete_coverage";
    case errc::non_positive_yield: return "non_positive_yield";
    case errc::too_few_sites: return "too_few_sites";
    case errc::not_enough_sites: return "not_enough_sites";
    case errc::missing_source: return "missing_source";
    case errc::duplicate_key: return "duplicate_key";
    case errc::empty_input: return "empty_input";
    case errc::zero_reference: return "zero_reference";
    case errc::misaligned_grids: return "misaligned_grids";
  }
  return "unknown_error";
}

bool Error::is_validation() const {
  switch (code_) {
    case errc::io_error:
    case errc::schema_mismatch:
    case errc::range_violation:
    case errc::missing_month:
    case errc::duplicate_record:
    case errc::bad_config:
    case errc::invalid_range:
      return true;
    default:
      return false;
  }
}

void fail(errc code, const std::string& message) { throw Error(code, message); }

}  // namespace pvyield
