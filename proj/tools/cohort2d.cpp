#include "cohort2d/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
	return cohort2d::cli::run(argc, argv, std::cout, std::cerr);
}
