#include "flexcert/cli.hpp"

int main(int argc, char** argv) { return flexcert::cli::run(argc, argv); }
