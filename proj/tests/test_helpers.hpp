#pragma once

#include <fstream>
#include <sstream>
#include <string>

namespace leosched::testing {

inline std::string read_test_file(const std::string& name) {
  std::ifstream in(std::string(LEOSCHED_TEST_DATA) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace leosched::testing
