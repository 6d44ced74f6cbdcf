#pragma once

#include <stdexcept>
#include <string>

namespace spectralign {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonManifold : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateFace : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularMass : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateCut : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GenerationExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyUnion : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AllStalled : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spectralign
