#include <iostream>

#include "trajstitch/app/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return trajstitch::app::run_cli(args, std::cout, std::cerr);
}
