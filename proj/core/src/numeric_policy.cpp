#include "cmp/numeric_policy.hpp"

#include <cstdlib>
#include <string>

#include "cmp/error.hpp"

namespace cmp {

NumericPolicy NumericPolicy::strict() { return NumericPolicy{}; }

NumericPolicy NumericPolicy::loose() {
  NumericPolicy p;
  p.lp_feasible_below = 1e-9;
  p.lp_infeasible_above = 1e-7;
  return p;
}

NumericPolicy NumericPolicy::from_env() {
  const char* v = std::getenv("CMP_NUM_POLICY");
  if (v == nullptr || std::string(v).empty() || std::string(v) == "strict") return strict();
  if (std::string(v) == "loose") return loose();
  fail(ErrorCode::InvalidArgument, std::string("CMP_NUM_POLICY must be strict or loose, got ") + v);
}

}  // namespace cmp
