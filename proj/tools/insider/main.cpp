#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "insider/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  insider::cli::Environment env;
  if (const char* repo = std::getenv("INSIDER_REPO"); repo && *repo) env.repo_dir = repo;
  return insider::cli::Run(args, std::cout, std::cerr, env);
}
