#include <iostream>

#include "mfpkit/cli/app.hpp"

int main(int argc, char** argv) { return mfpkit::cli::run(argc, argv, std::cout, std::cerr); }
