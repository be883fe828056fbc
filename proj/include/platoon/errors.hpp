#ifndef PLATOON_ERRORS_HPP
#define PLATOON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace platoon {

struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SeriesTooShort : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SolverFailure : std::runtime_error {
  explicit SolverFailure(const std::string& what, int step = -1)
      : std::runtime_error(what), step_index(step) {}
  int step_index;  // closed-loop step where the solve failed, -1 if not in a loop
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedLog : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace platoon

#endif
