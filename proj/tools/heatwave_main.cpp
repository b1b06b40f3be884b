#include <vector>
#include <string>

#include "heatwave/cli.hpp"

int main(int argc, char** argv) {
  return heatwave::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
