#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "selectlik_cli/cli.hpp"

namespace selectlik::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string& cell, double& value) {
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::vector<StudyObservation> parse_studies(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<StudyObservation> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const std::string row = trim(line);
    if (row.empty()) continue;
    if (!header_seen) {
      if (row != "effect,se") throw InputError("line " + std::to_string(line_no) + ": expected header \"effect,se\"");
      header_seen = true;
      continue;
    }
    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos)
      throw InputError(where + "expected two cells");
    const std::string a = trim(std::string_view(row).substr(0, comma));
    const std::string b = trim(std::string_view(row).substr(comma + 1));
    if (a.empty() || b.empty()) throw InputError(where + "missing cell");
    double effect = 0.0, se = 0.0;
    if (!parse_double(a, effect) || !std::isfinite(effect)) throw InputError(where + "effect is not a finite number");
    if (!parse_double(b, se) || !std::isfinite(se)) throw InputError(where + "se is not a finite number");
    if (!(se > 0.0)) throw InputError(where + "se must be strictly positive");
    out.emplace_back(effect, se);
  }
  if (!header_seen) throw InputError("empty studies file: expected header \"effect,se\"");
  if (out.empty()) throw InputError("studies file has no rows");
  return out;
}

std::vector<StudyObservation> read_studies(const std::string& path) { return parse_studies(slurp(path)); }

std::vector<double> read_sigmas(const std::string& path) {
  std::istringstream in(slurp(path));
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> out;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string cell = trim(line);
    if (cell.empty() || (out.empty() && cell == "se")) continue;
    double v = 0.0;
    if (!parse_double(cell, v) || !std::isfinite(v) || !(v > 0.0))
      throw InputError(path + " line " + std::to_string(line_no) + ": se must be a positive number");
    out.push_back(v);
  }
  if (out.empty()) throw InputError(path + ": no standard errors");
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string format_studies(const std::vector<StudyObservation>& studies) {
  std::string s = "effect,se\n";
  for (const auto& o : studies) s += format_double(o.effect()) + "," + format_double(o.se()) + "\n";
  return s;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw InputError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot move output into place at " + path + ": " + ec.message());
  }
}

}  // namespace selectlik::cli
