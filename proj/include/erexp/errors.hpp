#pragma once

#include <stdexcept>
#include <string>

namespace erexp {

// All validation failures thrown by this library derive from std::invalid_argument
// (bad inputs) or std::domain_error (evaluation outside a function's domain), so
// callers can catch the standard categories without knowing the specific type.

// Channel matrix / input distribution malformed (negative entries, bad row sums,
// alphabet too small, size mismatch).
class invalid_ensemble : public std::invalid_argument {
 public:
  explicit invalid_ensemble(const std::string& what) : std::invalid_argument(what) {}
};

// An operation that requires the output-symmetry property was called on an
// ensemble that fails the symmetry check.
class not_symmetric : public std::invalid_argument {
 public:
  explicit not_symmetric(const std::string& what) : std::invalid_argument(what) {}
};

// Rate outside [0, I(X;Y)) where the rate equation is solvable.
class rate_out_of_range : public std::invalid_argument {
 public:
  explicit rate_out_of_range(const std::string& what) : std::invalid_argument(what) {}
};

// Negative threshold, or a threshold too large for a closed form to apply.
class invalid_threshold : public std::invalid_argument {
 public:
  explicit invalid_threshold(const std::string& what) : std::invalid_argument(what) {}
};

class threshold_too_large : public invalid_threshold {
 public:
  explicit threshold_too_large(const std::string& what) : invalid_threshold(what) {}
};

// Alphabets beyond the sizes an exhaustive grid search can afford.
class alphabet_too_large : public std::invalid_argument {
 public:
  explicit alphabet_too_large(const std::string& what) : std::invalid_argument(what) {}
};

// Evaluation point outside a function's domain (e.g. tilting exponent s <= 0
// against a channel with zero entries, x*ln(x) conventions violated).
class domain_error : public std::domain_error {
 public:
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// An exact computation would overflow the representable/enumerable range
// (e.g. a binomial sum whose required window exceeds what can be enumerated).
class overflow_error : public std::domain_error {
 public:
  explicit overflow_error(const std::string& what) : std::domain_error(what) {}
};

// A request exceeds a configured resource budget (e.g. codebook letters).
class budget_exceeded : public std::invalid_argument {
 public:
  explicit budget_exceeded(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace erexp
