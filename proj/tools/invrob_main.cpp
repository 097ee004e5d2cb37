// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "invrob/cli.hpp"

int main(int argc, char** argv) {
  return invrob::cli::run(argc, argv, std::cout, std::cerr);
}
