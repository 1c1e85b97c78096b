#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace leosched::cli {

namespace fs = std::filesystem;

/// Raised for problems with user input; the CLI exits with status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path);
/// Writes `path.tmp-<pid>` and renames it over `path`.
void write_atomic(const fs::path& path, const std::string& content);
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& path);

}  // namespace leosched::cli
