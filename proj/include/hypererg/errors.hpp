#pragma once

#include <stdexcept>
#include <string>

namespace hypererg {

// Exit tier of a failure: 1 = a mathematical check failed, 2 = bad input, 3 = size cap.
enum class Tier { Assertion = 1, Input = 2, Resource = 3 };

class Error : public std::runtime_error {
 public:
  Error(Tier tier, const std::string& what) : std::runtime_error(what), tier_(tier) {}
  Tier tier() const noexcept { return tier_; }

 private:
  Tier tier_;
};

struct InputError : Error {
  explicit InputError(const std::string& w) : Error(Tier::Input, w) {}
};

// Out-of-domain arguments (coincident endpoints, diagonal cylinders, ...).
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(Tier::Input, w) {}
};

struct ResourceError : Error {
  explicit ResourceError(const std::string& w) : Error(Tier::Resource, w) {}
};

// An invariant or cross-check failed.
struct AssertionFailure : Error {
  explicit AssertionFailure(const std::string& w) : Error(Tier::Assertion, w) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(Tier::Assertion, w) {}
};

struct ConsistencyError : Error {
  explicit ConsistencyError(const std::string& w) : Error(Tier::Assertion, w) {}
};

struct BoundednessViolation : Error {
  explicit BoundednessViolation(const std::string& w) : Error(Tier::Assertion, w) {}
};

struct FundamentalDomainViolation : Error {
  explicit FundamentalDomainViolation(const std::string& w) : Error(Tier::Assertion, w) {}
};

}  // namespace hypererg
