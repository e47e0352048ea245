#pragma once

#include <stdexcept>
#include <string>

namespace singext {

enum class ErrorKind {
  Config,             // malformed or inconsistent input
  SpectralPoint,      // z too close to the spectrum of L
  Truncation,         // tail bound above tolerance or divergent series
  Pole,               // z at a pole of a rational model term
  ExtensionSpectrum,  // Y - M(z) X singular: z in the spectrum of the extension
  Consistency,        // two independent evaluation routes disagree
  Domain,             // element outside the domain of a relation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

// Exit-code contract of the command line tool.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 2;
inline constexpr int kCondition = 3;
inline constexpr int kNumerical = 4;
inline constexpr int kSuite = 5;
}  // namespace exit_code

int exit_code_for(ErrorKind kind);

}  // namespace singext
