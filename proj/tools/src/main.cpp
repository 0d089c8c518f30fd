#include <iostream>
#include <string>
#include <vector>

#include "aicare/cli/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return aicare::cli::dispatch(args, std::cout, std::cerr);
}
