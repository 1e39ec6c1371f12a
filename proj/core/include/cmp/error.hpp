#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmp {

enum class ErrorCode {
  ZeroColumn,
  RankDeficient,
  SingularBlock,
  NotMember,
  NotACone,
  NotBoxProduct,
  NotConverged,
  CycleLimit,
  BranchLimit,
  NumericallyAmbiguous,
  UnsupportedCombination,
  NotIrreducible,
  BudgetExceeded,
  NoSolutionWithinKmax,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace cmp
