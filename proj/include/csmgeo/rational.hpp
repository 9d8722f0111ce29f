#pragma once
// Exact rational parsing shared by the machine factories and the exact
// ensemble distributions.

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace csmgeo {

// Parse "p/q" or a plain decimal into an exact rational.
boost::multiprecision::cpp_rational rational_from_literal(const std::string& lit);

}  // namespace csmgeo
