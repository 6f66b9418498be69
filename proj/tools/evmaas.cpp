#include "evmaas/cli.hpp"

int main(int argc, char** argv) { return evmaas::run_cli(argc, argv); }
