#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rz {

enum class Errc {
  invalid_argument,   // parameter outside its documented range
  out_of_domain,      // evaluation point outside a table or function domain
  pole_collision,     // evaluation or contour too close to a pole
  pole_order,         // operation needs a simple pole at s = 1
  resolution,         // quadrature refused: too few panels for the oscillation
  non_convergence,    // series or extrapolation did not settle
  contract_violation, // a numerical contract checked at run time failed
  resource_exhausted, // cutoff beyond the configured memory budget
  overflow,           // exact integer arithmetic overflowed
  malformed_header,   // cache file header unreadable
  checksum_mismatch,  // cache value block corrupted or truncated
  version_mismatch,   // cache file magic or version unknown
  io,                 // filesystem failure
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(Errc::invalid_argument, what);
}

}  // namespace rz
