#pragma once
// Run manifests: every CLI invocation writes exactly one run.meta into its
// output directory recording the subcommand, parameters, seed, input file
// digests, and output file digests. No wall-clock anywhere: re-running the
// recorded command reproduces every output byte for byte.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace csmgeo {

inline constexpr const char* kToolVersion = "csmgeo 0.1.0";

struct RunManifest {
  std::string subcommand;
  uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> params;         // ordered as given
  std::vector<std::pair<std::string, std::string>> input_digests;  // path -> fnv1a64
  std::vector<std::pair<std::string, std::string>> output_digests;

  void add_param(const std::string& key, const std::string& value);
  void add_input(const std::string& path);   // digests the file now
  void add_output(const std::string& path);  // digests the file now

  std::string to_text() const;
  void write(const std::string& dir) const;  // <dir>/run.meta
};

// FNV-1a digest of a file's bytes, hex-encoded; throws if unreadable.
std::string digest_file(const std::string& path);

}  // namespace csmgeo
