#include <iostream>

#include "ddff/pipeline.hpp"

int main(int argc, char** argv) { return ddff::pipeline::main_entry(argc, argv, std::cout, std::cerr); }
