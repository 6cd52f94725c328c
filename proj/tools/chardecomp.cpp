#include "chardecomp/cli.hpp"

int main(int argc, char** argv) { return chardecomp::cli::run(argc, argv); }
