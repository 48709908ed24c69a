#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lapmm {

enum class ErrorCode {
  kIndexOutOfRange,
  kNonpositiveWeight,
  kDuplicateEdge,
  kDimensionMismatch,
  kFactorTooSmall,
  kNonpositiveFloor,
  kNoConvergence,
  kAsymmetricInput,
  kInfeasibleStart,
  kBlockUpdateFailure,
  kSingularSystem,
  kNotSymmetric,
  kNegativeCostEntry,
  kInconsistentDimensions,
  kNoProgress,
  kSingularKkt,
  kInvalidArgument,
  kParse,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the MM driver when a block solver throws or returns a non-finite point.
class BlockUpdateFailure : public Error {
 public:
  BlockUpdateFailure(long block, const std::string& what)
      : Error(ErrorCode::kBlockUpdateFailure, "block " + std::to_string(block) + ": " + what),
        block_(block) {}

  long block() const noexcept { return block_; }

 private:
  long block_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace lapmm
