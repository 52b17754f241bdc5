#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kahler {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  ParseError(std::size_t pos, std::vector<std::string> expected, const std::string& msg);
  std::size_t position;
  std::vector<std::string> expected;
};

// Jet order beyond kMaxJetOrder, or quotient basis beyond its cap.
struct OverflowError : Error {
  using Error::Error;
};

struct RankError : Error {
  using Error::Error;
};

struct ToleranceError : Error {
  using Error::Error;
};

}  // namespace kahler
