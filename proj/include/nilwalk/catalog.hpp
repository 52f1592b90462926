#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nilwalk/algebra.hpp"
#include "nilwalk/exact_matrix.hpp"

namespace nilwalk {

// Faithful unipotent representation: images of the basis vectors as
// nilpotent matrices, in basis order.
struct MatrixRepresentation {
  std::vector<ExactMatrix> basis_images;
  int matrix_dim() const { return basis_images.empty() ? 0 : basis_images.front().dim(); }
};

struct GroupCatalogEntry {
  std::string name;
  LieAlgebra algebra;
  std::optional<MatrixRepresentation> representation;
};

std::vector<std::string> catalog_names();

// heisenberg3, ut4 or free2step3. Throws StructuralError for unknown names.
const GroupCatalogEntry& catalog_entry(const std::string& name);

// Abelian algebra with the given layer dimensions; all brackets vanish.
LieAlgebra abelian_algebra(std::vector<int> dims);

// Parsed but not yet validated JSON algebra document.
struct AlgebraDocument {
  std::string name;
  GradedBasis basis;
  StructureConstants constants;
};

// {step, dims, brackets: [{left:[i,j], right:[k,l], out:[{label:[m,n], num, den}]}]}.
// An entry sets [left,right]; the reverse bracket is filled by antisymmetry
// unless the document lists it explicitly. Throws StructuralError.
AlgebraDocument parse_algebra_document(const nlohmann::json& doc, std::string name = "custom");

// Structure constants read off a matrix representation by taking commutators
// of the basis images. Throws MathError if a commutator leaves the span.
StructureConstants constants_from_representation(const GradedBasis& basis,
                                                 const MatrixRepresentation& rep);

nlohmann::json algebra_to_json(const LieAlgebra& g);

}  // namespace nilwalk
