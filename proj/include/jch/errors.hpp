#pragma once

#include <stdexcept>
#include <string>

namespace jch {

// Base class for all library errors. Subtypes exist so callers and tests
// can catch a specific failure mode instead of parsing messages.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct IndexOutOfRange : Error { using Error::Error; };
struct SelfLoop : Error { using Error::Error; };
struct Disconnected : Error { using Error::Error; };
struct LTooLarge : Error { using Error::Error; };
struct EmptyPartition : Error { using Error::Error; };

struct SectorEmpty : Error { using Error::Error; };
struct SiteOutOfRange : Error { using Error::Error; };
struct BasisTooLarge : Error { using Error::Error; };

struct UnphysicalTarget : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct SectorMismatch : Error { using Error::Error; };

struct ToleranceNotMet : Error { using Error::Error; };
struct ConservationViolation : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };

struct ZeroPsi : Error { using Error::Error; };

struct ConfigInvalid : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace jch
