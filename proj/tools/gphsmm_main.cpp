#include "cli.hpp"

int main(int argc, char** argv) { return gphsmm::cli::run(argc, argv); }
