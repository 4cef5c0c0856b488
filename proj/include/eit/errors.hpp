#pragma once

#include <stdexcept>
#include <string>

namespace eit {

/// Base class for every error raised by the library. The CLI maps the
/// category onto an exit status.
class Error : public std::runtime_error {
 public:
  enum class Category { kConfig, kSolver };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

  /// Throws a copy of the concrete error with `context` prepended.
  [[noreturn]] virtual void rethrow_with_context(const std::string& context) const {
    throw Error(category_, context + what());
  }

 private:
  Category category_;
};

#define EIT_DEFINE_ERROR(Name, Cat)                                      \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(Category::Cat, what) {} \
    [[noreturn]] void rethrow_with_context(const std::string& context) const override { \
      throw Name(context + what());                                      \
    }                                                                    \
  };

EIT_DEFINE_ERROR(InvalidArgument, kConfig)
EIT_DEFINE_ERROR(ConfigError, kConfig)
EIT_DEFINE_ERROR(InconsistentFrame, kConfig)
EIT_DEFINE_ERROR(SingularParameters, kConfig)
EIT_DEFINE_ERROR(ConventionViolation, kSolver)
EIT_DEFINE_ERROR(StateCorruption, kSolver)
EIT_DEFINE_ERROR(NoUniqueSteadyState, kSolver)
EIT_DEFINE_ERROR(IntegrationFailure, kSolver)
EIT_DEFINE_ERROR(DivergentVelocity, kSolver)
EIT_DEFINE_ERROR(DivisionByZero, kSolver)

#undef EIT_DEFINE_ERROR

}  // namespace eit
