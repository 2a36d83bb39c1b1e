#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "selectlik/model.hpp"

namespace selectlik::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kNonConvergence = 3;

inline constexpr int kSchemaVersion = 1;

/// Bad file contents or flags; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a studies CSV (header "effect,se"). Errors name the line.
std::vector<StudyObservation> read_studies(const std::string& path);
std::vector<StudyObservation> parse_studies(const std::string& text);

/// Standard errors, one per line; an optional "se" header line is skipped.
std::vector<double> read_sigmas(const std::string& path);

std::string format_studies(const std::vector<StudyObservation>& studies);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

/// Shortest text that reads back as the same double.
std::string format_double(double x);

/// Entry point behind the executable; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selectlik::cli
