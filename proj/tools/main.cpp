#include "emtherm/cli.hpp"

int main(int argc, char** argv) { return emtherm::run_cli(argc, argv); }
