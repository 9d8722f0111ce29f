#pragma once
// Predictive equivalence of internal states and the degeneracy stratification
// of a face. Two interior machines of the same type belong to the same
// connected component of the non-degenerate part iff they can be joined
// without touching any stratum; we decide this with an exact straight-segment
// test and report "unknown" when the segment meets only thin strata.

#include <string>
#include <vector>

#include "csmgeo/machine.hpp"

namespace csmgeo {

// Group states whose word distributions agree, within tol, on every word up
// to length 2*n_states - 1 (which determines the whole process). Refuses when
// the word count exceeds the cap.
StatePartition predictive_partition(const Machine& m, double tol = 1e-10,
                                    uint64_t word_cap = 10000000);

// Non-discrete state partitions compatible with the transition structure:
// states in a block share the same defined-symbol set, and for each symbol the
// block of the target state does not depend on the representative. Equalizing
// tied rows on such a partition produces a machine whose predictive partition
// coarsens to it; these are exactly the degeneracy strata of the face.
std::vector<StatePartition> degeneracy_strata(const DfaType& dfa);

enum class ComponentRelation { same, different, unknown };

struct ComponentCheck {
  ComponentRelation relation;
  std::string witness;  // stratum / reasoning behind the answer
};

// Decide whether two non-degenerate interior machines of the same type lie in
// the same component of the non-degenerate part. Exact rational arithmetic on
// the straight segment between them:
//   - crosses no stratum               -> same
//   - endpoints strictly separated by a codimension-1 stratum -> different
//   - otherwise                        -> unknown
ComponentCheck same_component(const Machine& a, const Machine& b);

}  // namespace csmgeo
