#include "cli.hpp"

int main(int argc, char** argv) { return xhodge::cli::run(argc, argv); }
