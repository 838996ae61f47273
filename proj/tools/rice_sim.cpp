#include "rice/cli.h"

int main(int argc, char** argv) { return rice::cli::main(argc, argv); }
