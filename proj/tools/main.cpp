#include "cli.hpp"

int main(int argc, char** argv) { return scnd::cli::run(argc, argv); }
