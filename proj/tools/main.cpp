#include "twoboard/cli.hpp"

int main(int argc, char** argv) { return twoboard::run_cli(argc, argv); }
