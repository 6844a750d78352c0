#ifndef TWPARSE_COMMON_H
#define TWPARSE_COMMON_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace twparse {

// Malformed input data (bad CoNLL-U, unalignable tokens, ...). The CLI maps
// this to exit status 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad command line or incompatible option combination; exit status 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

std::vector<std::string> split(const std::string& s, char sep);
std::vector<std::string> split_ws(const std::string& s);
std::string trim(const std::string& s);
std::string lowercase(const std::string& s);
bool starts_with(const std::string& s, const std::string& prefix);
bool ends_with(const std::string& s, const std::string& suffix);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

// Parses a non-negative integer, returns false on any non-digit content.
bool parse_uint(const std::string& s, int* out);

uint64_t fnv1a64(const void* data, size_t n);
uint64_t fnv1a64_file(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// "12.3" style fixed formatting used by evaluation reports.
std::string fixed1(double v);
std::string fixed2(double v);

}  // namespace twparse

#endif
