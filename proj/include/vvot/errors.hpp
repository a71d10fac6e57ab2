#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vvot {

enum class Errc {
  Domain,
  LengthMismatch,
  Asymmetric,
  NegativeWeight,
  Disconnected,
  RankDeficient,
  NotInRange,
  DivergentIntegral,
  StiffAtBoundary,
  BoundaryAnchors,
  InfeasibleEndpoints,
  NotImplemented,
  MassMismatch,
  Infeasible,
  ThetaNotVanishing,
  NotFound,
  ChainViolation,
  BoundaryAtom,
  SingularLaplacian,
  ReferenceMismatch,
  NonFiniteDriver,
  Diverged,
  Parse,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace vvot
