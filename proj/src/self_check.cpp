#include "nilwalk/self_check.hpp"

#include "nilwalk/matrix_oracle.hpp"
#include "nilwalk/rng.hpp"

namespace nilwalk {
namespace {

ExactVector random_element(RandomStream& rng, int dim) {
  std::vector<Rational> c(dim);
  for (auto& x : c) {
    x = Rational(static_cast<long>(rng.next_u32() % 19) - 9, static_cast<long>(rng.next_u32() % 6) + 1);
    x.canonicalize();
  }
  return ExactVector(std::move(c));
}

std::string show(const ExactVector& v) {
  std::string s = "(";
  for (int c = 0; c < v.size(); ++c) s += (c ? ", " : "") + to_string(v[c]);
  return s + ")";
}

}  // namespace

std::vector<LemmaReport> group_law_self_checks(const GroupLaw& law, const MatrixRepresentation* rep, int samples,
                                               std::uint64_t seed) {
  const int dim = law.dim();
  const auto& basis = law.basis();
  const auto zero = ExactVector::zero(dim);
  const Rational r(2, 3);
  LemmaReport identity, inverse, assoc, dil, additive, oracle;
  const char* names[] = {"identity", "inverse", "associativity", "dilation_automorphism", "level_one_additive",
                         "matrix_oracle"};
  int idx = 0;
  for (auto* rp : {&identity, &inverse, &assoc, &dil, &additive, &oracle}) {
    rp->check = names[idx++];
    rp->parameters = {{"samples", samples}};
  }
  GroupCatalogEntry entry{"oracle", law.algebra(), std::nullopt};
  if (rep) entry.representation = *rep;
  for (int i = 0; i < samples; ++i) {
    RandomStream rng(seed, 0x5e1fu, 0, static_cast<std::uint32_t>(i));
    const auto x = random_element(rng, dim), y = random_element(rng, dim), z = random_element(rng, dim);
    const auto xy = law.multiply(x, y);
    if (law.multiply(x, zero) != x || law.multiply(zero, x) != x) identity.fail("x = " + show(x));
    if (law.multiply(x, -x) != zero) inverse.fail("x = " + show(x));
    if (law.multiply(xy, z) != law.multiply(x, law.multiply(y, z)))
      assoc.fail("x = " + show(x) + ", y = " + show(y) + ", z = " + show(z));
    if (dilate(basis, r, xy) != law.multiply(dilate(basis, r, x), dilate(basis, r, y)))
      dil.fail("x = " + show(x) + ", y = " + show(y));
    auto [lo, hi] = basis.level_range(1);
    for (int c = lo; c < hi; ++c)
      if (xy[c] != x[c] + y[c]) {
        additive.fail("x = " + show(x) + ", y = " + show(y));
        break;
      }
    if (rep && matrix_oracle_product(entry, {x, y}) != xy)
      oracle.fail("x = " + show(x) + ", y = " + show(y));
  }
  if (!rep) {
    oracle.status = LemmaStatus::kNotApplicable;
    oracle.note = "no matrix representation";
  }
  return {identity, inverse, assoc, dil, additive, oracle};
}

}  // namespace nilwalk
