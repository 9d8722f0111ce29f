#include "csmgeo/runmeta.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "csmgeo/util.hpp"

namespace csmgeo {

std::string digest_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot digest missing file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return hex64(fnv1a64(buf.str()));
}

void RunManifest::add_param(const std::string& key, const std::string& value) {
  params.emplace_back(key, value);
}

void RunManifest::add_input(const std::string& path) {
  input_digests.emplace_back(path, digest_file(path));
}

void RunManifest::add_output(const std::string& path) {
  output_digests.emplace_back(path, digest_file(path));
}

std::string RunManifest::to_text() const {
  std::ostringstream out;
  out << "tool = " << kToolVersion << "\n";
  out << "subcommand = " << subcommand << "\n";
  out << "seed = " << seed << "\n";
  for (const auto& [k, v] : params) out << "param " << k << " = " << v << "\n";
  for (const auto& [p, d] : input_digests) out << "input " << p << " = " << d << "\n";
  for (const auto& [p, d] : output_digests) out << "output " << p << " = " << d << "\n";
  return out.str();
}

void RunManifest::write(const std::string& dir) const {
  std::string path = dir + "/run.meta";
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write manifest: " + path);
  f << to_text();
}

}  // namespace csmgeo
