#include <iostream>

#include "tapered/cli.hpp"

int main(int argc, char** argv)
{
  return tapered::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
