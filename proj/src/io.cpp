#include "srm/io.hpp"

#include "json.hpp"

namespace srm {

using nlohmann::json;

std::string to_json(const HermitianNorm& n) {
  json gram = json::array();
  for (Index i = 0; i < n.dim(); ++i)
    for (Index j = 0; j < n.dim(); ++j) gram.push_back({n.gram()(i, j).real(), n.gram()(i, j).imag()});
  json doc = {{"dim", n.dim()},
              {"basis_label", {{"name", n.basis().name}, {"degree", n.basis().degree}}},
              {"gram", gram}};
  return doc.dump(2);
}

HermitianNorm hermitian_norm_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Io, std::string("invalid norm JSON: ") + e.what());
  }
  const Index n = doc.at("dim").get<Index>();
  const json& gram = doc.at("gram");
  if (n <= 0 || gram.size() != static_cast<std::size_t>(n * n))
    throw Error(ErrorKind::Io, "gram entry count does not match dim");
  CMatrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const json& e = gram.at(static_cast<std::size_t>(i * n + j));
      g(i, j) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  BasisLabel basis;
  if (doc.contains("basis_label")) {
    basis.name = doc["basis_label"].value("name", basis.name);
    basis.degree = doc["basis_label"].value("degree", basis.degree);
  }
  return HermitianNorm(g, basis);
}

}  // namespace srm
