#pragma once

#include <stdexcept>
#include <string>

namespace augdist {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error { public: using Error::Error; };
class FormatError : public Error { public: using Error::Error; };
class SizeError : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class RegistryError : public Error { public: using Error::Error; };
class LookupError : public Error { public: using Error::Error; };
class FingerprintError : public Error { public: using Error::Error; };
class UndefinedError : public Error { public: using Error::Error; };
class CoverageError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

/// No candidate dataset satisfies the error-matching constraint.
class FeasibilityError : public Error {
public:
  FeasibilityError(const std::string& what, double nearest_average)
      : Error(what), nearest_average_(nearest_average) {}
  double nearest_average() const noexcept { return nearest_average_; }

private:
  double nearest_average_;
};

/// No sampled candidate is made of exactly the selected corruptions.
class CompositionError : public Error { public: using Error::Error; };

}  // namespace augdist
