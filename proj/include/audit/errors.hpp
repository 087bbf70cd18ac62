#pragma once

#include <stdexcept>
#include <string>

namespace audit {

enum class Errc {
  // catalog
  missing_file,
  malformed_row,
  duplicate_id,
  duplicate_normalized_title,
  empty_catalog,
  // promptgen
  k_too_large,
  unknown_template,
  unknown_category,
  // backends
  endpoint_unreachable,
  auth_failure,
  retries_exhausted,
  fixture_miss,
  // parser
  empty_parse,
  // metrics
  empty_list,
  rank_exceeds_k,
  // analysis
  empty_input,
  missing_neutral,
  attribute_set_mismatch,
  // report
  io_failure,
  schema_violation,
  too_many_axes,
  // runner
  parse_error,
  invalid_field,
  missing_catalog,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

  // Errors a user can fix by editing inputs, as opposed to runtime faults.
  bool is_validation() const {
    switch (code_) {
      case Errc::missing_file:
      case Errc::k_too_large:
      case Errc::empty_parse:
      case Errc::malformed_row:
      case Errc::duplicate_id:
      case Errc::duplicate_normalized_title:
      case Errc::empty_catalog:
      case Errc::unknown_category:
      case Errc::unknown_template:
      case Errc::parse_error:
      case Errc::invalid_field:
      case Errc::missing_catalog:
        return true;
      default:
        return false;
    }
  }

 private:
  Errc code_;
};

}  // namespace audit
