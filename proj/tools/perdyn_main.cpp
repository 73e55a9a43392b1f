#include "perdyn/cli.hpp"

int main(int argc, char** argv) { return perdyn::run_cli(argc, argv); }
