#include <string>
#include <vector>

#include "harmbench/cli.hpp"

int main(int argc, char** argv) {
  return harmbench::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
