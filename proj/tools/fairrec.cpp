#include <iostream>
#include <string>
#include <vector>

#include "fairrec/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fairrec::cli::dispatch(std::move(args), std::cout, std::cerr);
}
