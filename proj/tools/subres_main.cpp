#include "subres/cli.hpp"

int main(int argc, char** argv) { return subres::cli::run(argc, argv); }
