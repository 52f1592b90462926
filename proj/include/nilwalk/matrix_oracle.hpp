#pragma once

#include <vector>

#include "nilwalk/catalog.hpp"

namespace nilwalk {

ExactMatrix to_matrix(const MatrixRepresentation& rep, const ExactVector& x);

// Reads coordinates back from a matrix in the span of the basis images.
// Throws MathError if it is not in the span.
ExactVector from_matrix(const MatrixRepresentation& rep, const ExactMatrix& m);

// Product of exp-coordinates computed through the unipotent matrix group:
// exp each element, multiply, take the finite log. Throws MathError("no oracle")
// when the entry has no representation.
ExactVector matrix_oracle_product(const GroupCatalogEntry& entry, const std::vector<ExactVector>& xs);

}  // namespace nilwalk
