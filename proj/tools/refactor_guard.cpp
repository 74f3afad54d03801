#include <csignal>
#include <iostream>

#include "rguard/cli.hpp"

namespace {

extern "C" void on_signal(int) { rguard::request_shutdown(); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  return rguard::run_cli(argc, argv, std::cout, std::cerr);
}
