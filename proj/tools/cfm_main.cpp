#include "cfm/cli.hpp"

int main(int argc, char** argv) { return cfm::run_cli(argc, argv); }
