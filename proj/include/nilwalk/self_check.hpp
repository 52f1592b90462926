#pragma once

#include <cstdint>
#include <vector>

#include "nilwalk/catalog.hpp"
#include "nilwalk/group_law.hpp"
#include "nilwalk/report.hpp"

namespace nilwalk {

// Exact checks of the group law on random rational elements: identity,
// inverses, associativity, dilations as automorphisms, additivity on level 1,
// and agreement with the matrix oracle when a representation is given.
std::vector<LemmaReport> group_law_self_checks(const GroupLaw& law, const MatrixRepresentation* rep, int samples,
                                               std::uint64_t seed);

}  // namespace nilwalk
