#pragma once

#include <stdexcept>
#include <string>

namespace herit {

/// Base class for all library errors. The CLI maps the concrete
/// subclasses onto process exit codes.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model violates one of its structural invariants (weights not summing
/// to one, a correlation outside (-1,1), a non-positive spread, ...).
class model_error : public error {
 public:
  using error::error;
};

/// A covariance matrix that must be positive definite is not.
class definiteness_error : public error {
 public:
  using error::error;
};

/// Input data cannot be used (missing columns, no usable rows, degenerate
/// samples).
class data_error : public error {
 public:
  using error::error;
};

/// Every optimization start failed. The message carries per-start
/// diagnostics.
class optimization_error : public error {
 public:
  using error::error;
};

/// Curvature-based inference is unavailable (singular or indefinite
/// Hessian). Callers may fall back to the parametric bootstrap.
class inference_error : public error {
 public:
  using error::error;
};

/// Too many bootstrap replicates failed for the summary to be trusted.
class bootstrap_error : public error {
 public:
  using error::error;
};

}  // namespace herit
