#include "phasescan/scan.hpp"

int main(int argc, char** argv) { return phasescan::cli_main(argc, argv); }
