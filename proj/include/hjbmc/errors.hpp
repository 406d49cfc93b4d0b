#pragma once

#include <stdexcept>

namespace hjbmc {

/// Non-finite or otherwise unusable intermediate values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity that was not computed for this run.
class NotAvailableError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hjbmc
