#include "cli.hpp"

int main(int argc, char** argv) { return minklab::cli::run(argc, argv); }
