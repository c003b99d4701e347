#include "fracheat/cli.hpp"

int main(int argc, char **argv) { return fracheat::run_cli(argc, argv); }
