#include "sedkit/cli.h"

int main(int argc, char** argv) { return sedkit::cli::run(argc, argv); }
