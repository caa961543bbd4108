#pragma once

#include <stdexcept>
#include <string>

namespace geoforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape placement gave up after the bounded retry budget.
class PlacementError : public Error {
 public:
  PlacementError(const std::string& what, long image_index = -1)
      : Error(what), image_index_(image_index) {}
  long image_index() const noexcept { return image_index_; }

 private:
  long image_index_;
};

// Zero-area shapes, coincident curves and similar inputs with no unique answer.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class UnsupportedCurve : public Error {
 public:
  using Error::Error;
};

// Tensor or map dimensions that do not agree.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace geoforge
