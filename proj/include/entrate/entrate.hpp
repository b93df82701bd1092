#pragma once

#include "entrate/bounds.hpp"
#include "entrate/checks.hpp"
#include "entrate/forward.hpp"
#include "entrate/model.hpp"
#include "entrate/simulate.hpp"

namespace entrate {

inline constexpr const char* version = "0.1.0";

/// Stamped into every machine-readable CLI record.
inline constexpr const char* schema_version = "1";

}  // namespace entrate
