#include "cli.hpp"

int main(int argc, char** argv) { return ecborrow::cli::run(argc, argv); }
