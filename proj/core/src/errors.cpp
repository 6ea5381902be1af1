#include "cat0/errors.hpp"

namespace cat0 {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::malformed_input: return "malformed_input";
    case Errc::triangle_inequality: return "triangle_inequality";
    case Errc::disconnected: return "disconnected";
    case Errc::not_cat0: return "not_cat0";
    case Errc::not_adjacent: return "not_adjacent";
    case Errc::point_not_in_complex: return "point_not_in_complex";
    case Errc::pair_at_least_pi: return "pair_at_least_pi";
    case Errc::incompatible_splits: return "incompatible_splits";
    case Errc::lp_infeasible: return "lp_infeasible";
    case Errc::lp_unbounded: return "lp_unbounded";
    case Errc::numerical_breakdown: return "numerical_breakdown";
    case Errc::domain_error: return "domain_error";
    case Errc::budget_exceeded: return "budget_exceeded";
    case Errc::depth_exceeded: return "depth_exceeded";
    case Errc::unknown_location: return "unknown_location";
  }
  return "unknown";
}

}  // namespace cat0
