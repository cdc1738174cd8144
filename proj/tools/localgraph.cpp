#include <iostream>
#include <string>
#include <vector>

#include "localgraph/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return localgraph::cli_dispatch(args, std::cout, std::cerr);
}
