#include "crtmap/cli.hpp"

int main(int argc, char** argv) { return crtmap::cli::dispatch(argc, argv); }
