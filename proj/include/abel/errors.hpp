#pragma once

#include <stdexcept>
#include <string>

namespace abel {

/* Bad input or configuration: wrong shapes, unsorted data, out-of-range
 * parameters. Maps to CLI exit code 2. */
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/* A numerical certificate failed its threshold (stable-line residual too
 * large, decay slope not negative, splitting residual above tolerance).
 * Carries the failing quantity so refusals are always explained.
 * Maps to CLI exit code 3. */
struct Uncertified : std::runtime_error {
  std::string stage;
  std::string quantity;
  double value;
  double threshold;
  Uncertified(std::string stage_, std::string quantity_, double value_,
              double threshold_);
};

/* An orbit walked into a point where the exchange (or its inverse) is
 * undefined; carries how many steps succeeded. Expected and recoverable in
 * sampling loops, fatal in certified computations. */
struct OrbitTerminated : std::runtime_error {
  long steps_done;
  double coord;
  OrbitTerminated(long steps_done_, double coord_);
};

}  // namespace abel
