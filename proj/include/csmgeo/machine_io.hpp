#pragma once
// Machine spec files: flat key-value text.
//
//   states 2
//   alphabet 0 1
//   gamma 0 0 -> 1
//   gamma 0 1 -> 0
//   probs 0 0 = 0.3
//   probs 0 1 = 0.7
//
// States are integers 0..n-1, symbols are referenced by name. '#' starts a
// comment. Every gamma edge needs exactly one probs entry; probabilities may
// be decimals or fractions "p/q"; each state's row must sum to 1 within 1e-9.

#include <string>

#include "csmgeo/machine.hpp"

namespace csmgeo {

inline constexpr double kFileRowSumTol = 1e-9;

Machine parse_machine_text(const std::string& text, const std::string& origin = "<string>");
Machine read_machine_file(const std::string& path);
std::string machine_to_text(const Machine& m);
void write_machine_file(const Machine& m, const std::string& path);

}  // namespace csmgeo
