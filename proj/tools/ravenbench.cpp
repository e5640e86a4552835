#include "raven/cli/commands.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> env_out;
  if (const char* v = std::getenv("RAVENBENCH_OUT")) env_out = v;
  return raven::run_cli(args, std::cout, std::cerr, env_out);
}
