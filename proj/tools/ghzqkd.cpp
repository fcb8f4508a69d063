#include <ghzqkd/cli.hpp>

int main(int argc, char** argv) { return ghzqkd::cli::run_cli(argc, argv); }
