#include "cmp/error.hpp"

namespace cmp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::NotMember: return "NotMember";
    case ErrorCode::NotACone: return "NotACone";
    case ErrorCode::NotBoxProduct: return "NotBoxProduct";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::CycleLimit: return "CycleLimit";
    case ErrorCode::BranchLimit: return "BranchLimit";
    case ErrorCode::NumericallyAmbiguous: return "NumericallyAmbiguous";
    case ErrorCode::UnsupportedCombination: return "UnsupportedCombination";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NoSolutionWithinKmax: return "NoSolutionWithinKmax";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace cmp
