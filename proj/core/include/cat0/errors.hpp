#pragma once

#include <stdexcept>
#include <string>

namespace cat0 {

// Stable machine-readable failure codes.  The CLI prints these verbatim in its
// JSON error envelope, so renaming one is a breaking change.
enum class Errc {
  malformed_input,
  triangle_inequality,
  disconnected,
  not_cat0,
  not_adjacent,
  point_not_in_complex,
  pair_at_least_pi,
  incompatible_splits,
  lp_infeasible,
  lp_unbounded,
  numerical_breakdown,
  domain_error,
  budget_exceeded,
  depth_exceeded,
  unknown_location,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace cat0
