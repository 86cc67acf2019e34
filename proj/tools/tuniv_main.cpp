#include <string>
#include <vector>

#include "tuniv/cli_app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tuniv::run_cli(std::move(args));
}
