#include "cli.hpp"

int main(int argc, char** argv) { return pdm::cli::run({argv + 1, argv + argc}); }
