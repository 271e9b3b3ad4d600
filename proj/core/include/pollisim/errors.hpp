#pragma once

#include <stdexcept>
#include <string>

namespace pollisim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Pose composition across mismatched frames.
class FrameError : public Error {
public:
    explicit FrameError(const std::string& what) : Error(what) {}
};

/// Precondition violation on a numeric argument (non-positive depth, empty box, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// Scene generation could not satisfy placement constraints.
class GenerationError : public Error {
public:
    explicit GenerationError(const std::string& what) : Error(what) {}
};

/// Flower localization found no usable depth.
class LocalizationError : public Error {
public:
    explicit LocalizationError(const std::string& what) : Error(what) {}
};

/// Visual servo lost its target (caller re-runs the global scope).
class TargetLostError : public Error {
public:
    explicit TargetLostError(const std::string& what) : Error(what) {}
};

/// Point-cloud registration could not run (degenerate input).
class RegistrationError : public Error {
public:
    explicit RegistrationError(const std::string& what) : Error(what) {}
};

/// Cloud extraction produced no points.
class EmptyCloudError : public Error {
public:
    explicit EmptyCloudError(const std::string& what) : Error(what) {}
};

/// HSV flower-center search found nothing usable.
class CenterNotFoundError : public Error {
public:
    explicit CenterNotFoundError(const std::string& what) : Error(what) {}
};

/// Contact planning got degenerate input.
class PlanningError : public Error {
public:
    explicit PlanningError(const std::string& what) : Error(what) {}
};

/// Scenario configuration failed validation.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace pollisim
