#include "whitham/cli.hpp"

int main(int argc, char** argv) { return whitham::cli_dispatch(argc, argv); }
