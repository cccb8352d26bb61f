// Generates a deterministic toy speech corpus (wavs + manifest.json) for
// trying the CLI pipelines without real recordings.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "support/toy_corpus.hpp"

int main(int argc, char** argv) {
  std::string dir = "toy_corpus";
  std::uint64_t seed = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      dir = argv[++i];
    } else if (arg == "--seed" && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else {
      std::fprintf(stderr, "usage: exknet-toygen [--out DIR] [--seed N]\n");
      return 2;
    }
  }
  const std::string manifest = exknet::testsupport::make_toy_corpus(dir, seed);
  std::printf("wrote %s\n", manifest.c_str());
  return 0;
}
