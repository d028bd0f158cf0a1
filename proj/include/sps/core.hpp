// Core scalar type, tri-degree bookkeeping and error codes shared by every
// module of the engine.
#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace sps {

// All coefficients are exact rationals; no floating point anywhere.
using Rat = mpq_class;

inline std::string rat_str(const Rat& r) { return r.get_str(); }

// ---------------------------------------------------------------------------
// Errors

enum class Errc {
  SquareNotZero,
  DegreeMismatch,
  AlgebraMismatch,
  ShiftMismatch,
  NotAnAction,
  MasterEquationFails,
  NonUnitVolume,
  ConnectionNotFlat,
  TruncationExceeded,
  SingularSystem,
  ObstructionNonzero,
  NotNilpotent,
  CosimplicialIdentityViolation,
  SyntaxError,
  UnknownGenerator,
  InvalidArgument,
};

const char* errc_name(Errc c);

class EngineError : public std::runtime_error {
 public:
  EngineError(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw EngineError(code, what);
}

// ---------------------------------------------------------------------------
// Degrees

enum class Flag : unsigned char { Equal = 0, Unequal = 1 };

inline Flag flag_add(Flag a, Flag b) {
  return (a == b) ? Flag::Equal : Flag::Unequal;
}

// (cochain, chain, parity flag). Total parity is the mod-2 sum of the two
// integer degrees and the flag. Generator degrees in manifold models are
// non-negative; shifted duals and operator symbols may carry negative entries.
struct TriDegree {
  int cochain = 0;
  int chain = 0;
  Flag flag = Flag::Equal;

  bool operator==(const TriDegree&) const = default;

  int parity() const {
    int s = cochain + chain + (flag == Flag::Unequal ? 1 : 0);
    return ((s % 2) + 2) % 2;
  }

  TriDegree operator+(const TriDegree& o) const {
    return {cochain + o.cochain, chain + o.chain, flag_add(flag, o.flag)};
  }
  TriDegree operator-(const TriDegree& o) const {
    return {cochain - o.cochain, chain - o.chain, flag_add(flag, o.flag)};
  }

  std::string str() const;
};

// (-1)^(parity(a) * parity(b))
inline int koszul_sign(const TriDegree& a, const TriDegree& b) {
  return (a.parity() == 1 && b.parity() == 1) ? -1 : 1;
}

inline int koszul_sign(int parity_a, int parity_b) {
  return (parity_a % 2 != 0 && parity_b % 2 != 0) ? -1 : 1;
}

}  // namespace sps
