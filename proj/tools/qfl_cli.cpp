#include "qfl/cli.hpp"

int main(int argc, char** argv) { return qfl::cli::main(argc, argv); }
