#pragma once

#include <iostream>

namespace ldq::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kQualityFailed = 1;
inline constexpr int kUsage = 2;

// Subcommands: ingest, assess, improve, pipeline, gen-fixture, serve, vocab.
int run(int argc, const char* const* argv, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace ldq::cli
