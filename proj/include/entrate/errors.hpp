#pragma once

#include <stdexcept>
#include <string>

namespace entrate {

/// Rejected model parameters; the message names the offending field.
class parameter_error : public std::invalid_argument {
  public:
    parameter_error(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Sequence or depth argument exceeds the supported length.
class length_error : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// Tree expansion would exceed the configured node budget or hard depth cap.
class capacity_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Too few symbols for the requested block length.
class insufficient_data_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace entrate
