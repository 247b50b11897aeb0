#include "sflab/error.hpp"

namespace sflab {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::HermiticityViolation: return "hermiticity_violation";
    case ErrorCode::EmptyModel: return "empty_model";
    case ErrorCode::DuplicateHopping: return "duplicate_hopping";
    case ErrorCode::FileNotFound: return "file_not_found";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::InvalidParameter: return "invalid_parameter";
    case ErrorCode::InvalidFilter: return "invalid_filter";
    case ErrorCode::TooFewSites: return "too_few_sites";
    case ErrorCode::BadWeight: return "bad_weight";
    case ErrorCode::Gapless: return "gapless";
    case ErrorCode::RankJump: return "rank_jump";
    case ErrorCode::SymbolNotInvertible: return "symbol_not_invertible";
    case ErrorCode::SingularSymbol: return "singular_symbol";
    case ErrorCode::RefinementNeeded: return "refinement_needed";
    case ErrorCode::SingularLink: return "singular_link";
    case ErrorCode::IndeterminateLocalization: return "indeterminate_localization";
    case ErrorCode::AmbiguousCluster: return "ambiguous_cluster";
    case ErrorCode::AmbiguousSide: return "ambiguous_side";
  }
  return "unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::RefinementNeeded:
    case ErrorCode::SingularLink:
    case ErrorCode::IndeterminateLocalization:
    case ErrorCode::AmbiguousCluster:
    case ErrorCode::AmbiguousSide:
      return true;
    default:
      return false;
  }
}

}  // namespace sflab
