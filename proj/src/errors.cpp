#include "audit/errors.hpp"

namespace audit {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::missing_file: return "MissingFile";
    case Errc::malformed_row: return "MalformedRow";
    case Errc::duplicate_id: return "DuplicateId";
    case Errc::duplicate_normalized_title: return "DuplicateNormalizedTitle";
    case Errc::empty_catalog: return "EmptyCatalog";
    case Errc::k_too_large: return "KTooLarge";
    case Errc::unknown_template: return "UnknownTemplate";
    case Errc::unknown_category: return "UnknownCategory";
    case Errc::endpoint_unreachable: return "EndpointUnreachable";
    case Errc::auth_failure: return "AuthFailure";
    case Errc::retries_exhausted: return "RetriesExhausted";
    case Errc::fixture_miss: return "FixtureMiss";
    case Errc::empty_parse: return "EmptyParse";
    case Errc::empty_list: return "EmptyList";
    case Errc::rank_exceeds_k: return "RankExceedsK";
    case Errc::empty_input: return "EmptyInput";
    case Errc::missing_neutral: return "MissingNeutral";
    case Errc::attribute_set_mismatch: return "AttributeSetMismatch";
    case Errc::io_failure: return "IoFailure";
    case Errc::schema_violation: return "SchemaViolation";
    case Errc::too_many_axes: return "TooManyAxes";
    case Errc::parse_error: return "ParseError";
    case Errc::invalid_field: return "InvalidField";
    case Errc::missing_catalog: return "MissingCatalog";
  }
  return "Unknown";
}

}  // namespace audit
