// Acceptance gate: one PASS/FAIL line per criterion. The exit status is zero
// when the failing set equals the known-failure list passed on the command
// line (default: none), so regressions and unexpected passes both show up.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>

#include "srm/experiments.hpp"
#include "srm/fubini_study.hpp"
#include "srm/section_ring.hpp"

using namespace srm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Pinned tolerances.
constexpr double kGoldenTol = 1e-10;
constexpr double kGoldenSeconds = 30.0;
constexpr double kIsometrySeconds = 300.0;
constexpr double kFixtureTol = 1e-10;
constexpr int kMultGenKmax = 24;

std::string failed_names(const RunResult& r) {
  std::string s;
  for (const Assertion& a : r.assertions)
    if (!a.passed) s += (s.empty() ? "" : ", ") + a.name + "=" + format_cell(a.value) + " vs " + format_cell(a.threshold);
  return s;
}

Outcome all_pass(const std::string& name, double* seconds = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_experiment(name, {});
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (seconds) *seconds = dt;
  std::ostringstream d;
  d << name << ": " << r.assertions.size() << " assertions";
  if (!r.passed()) d << "; failing " << failed_names(r);
  d << "; " << std::fixed << std::setprecision(2) << dt << " s";
  return {r.passed(), d.str()};
}

Outcome criterion1() {
  double dt = 0.0;
  Outcome o = all_pass("gram-golden", &dt);
  const RunResult r = run_experiment("gram-golden", parse_config("thresholds: {rel_tol: 1.0e-10}"));
  o.pass = o.pass && r.passed() && dt < kGoldenSeconds && r.assertions.at(0).threshold == kGoldenTol;
  return o;
}

Outcome criterion2() {
  double dt = 0.0;
  Outcome o = all_pass("isometry-ratio", &dt);
  o.pass = o.pass && dt < kIsometrySeconds;
  return o;
}

// Independent oracle: minimal-norm preimages of x², xy, y² under the degree-(1, 1)
// multiplication map, solved as constrained least squares through the KKT system.
Outcome criterion4() {
  const HermitianNorm h1 = HermitianNorm::diagonal(RVector::Constant(2, 0.5), monomial_basis(1));
  const HermitianNorm t = hermitian_tensor(h1, h1);
  const CMatrix m = MultMap(1, 1).matrix;
  CMatrix kkt = CMatrix::Zero(7, 7);
  kkt.topLeftCorner(4, 4) = t.gram();
  kkt.topRightCorner(4, 3) = m.adjoint();
  kkt.bottomLeftCorner(3, 4) = m;
  RVector oracle(3);
  for (int i = 0; i < 3; ++i) {
    CVector rhs = CVector::Zero(7);
    rhs(4 + i) = 1.0;
    oracle(i) = t.norm_squared(kkt.fullPivLu().solve(rhs).head(4));
  }
  RVector expect(3);
  expect << 0.25, 0.125, 0.25;
  const CMatrix q = quotient_tensor_norm(h1, h1, 1, 1).gram();
  const CMatrix hilb2 = quadrature_gram(2, MetricOnL::round()).gram();
  const double e_oracle = (oracle - expect).cwiseAbs().maxCoeff();
  const double e_quot = (q - CMatrix(expect.cast<Complex>().asDiagonal())).cwiseAbs().maxCoeff();
  const double e_hilb = (q - 0.75 * hilb2).cwiseAbs().maxCoeff();
  std::ostringstream d;
  d << "oracle " << format_cell(e_oracle) << ", quotient " << format_cell(e_quot) << ", 3/4 Hilb_2 "
    << format_cell(e_hilb);
  return {std::max({e_oracle, e_quot, e_hilb}) <= kFixtureTol, d.str()};
}

Outcome criterion6() {
  const Outcome a = all_pass("bergman-decay"), b = all_pass("projector-bound");
  return {a.pass && b.pass, a.detail + " | " + b.detail};
}

Outcome criterion13() {
  HilbertFamily hilb(MetricOnL::round());
  const GradedNorm good = hilbert_graded_norm(hilb, kMultGenKmax);
  const MultGenReport ok = check_mult_generated(good, 1, kMultGenKmax, {2, 3, 4, 5});
  // Inflating N_k by e^{k²/4} breaks every split: k²/4 − Σ k_i²/4 grows like k².
  GradedNorm bad = good;
  bad.provenance = "corrupted";
  for (auto& [k, n] : bad.pieces) n = n.scaled(std::exp(0.25 * k * k));
  const MultGenReport broken = check_mult_generated(bad, 1, kMultGenKmax, {2, 3});
  std::ostringstream d;
  d << "Hilb(round): " << ok.checked << " checks, " << ok.violations.size() << " violations; corrupted: "
    << broken.violations.size() << " violations";
  return {ok.violations.empty() && ok.checked > 0 && !broken.violations.empty(), d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--known-failures=", 0) == 0) {
      std::stringstream ss(arg.substr(17));
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) known.insert(std::stoi(item));
    }
  }
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1},
      {2, criterion2},
      {3, [] { return all_pass("defect-scan"); }},
      {4, criterion4},
      {5, [] { return all_pass("tensor-laws"); }},
      {6, criterion6},
      {7, [] { return all_pass("tian-convergence"); }},
      {8, [] { return all_pass("distance-quantization"); }},
      {9, [] { return all_pass("geodesic-quantization"); }},
      {10, [] { return all_pass("counterexamples"); }},
      {11, [] { return all_pass("inductive-hilbert"); }},
      {12, [] { return all_pass("fekete"); }},
      {13, criterion13},
  };
  std::set<int> failing;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) failing.insert(id);
    std::printf("%s criterion %d: %s%s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(),
                !o.pass && known.count(id) ? " [known]" : "");
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - failing.size(), criteria.size());
  if (failing != known) {
    std::printf("failing set differs from the known-failure list\n");
    return 1;
  }
  return 0;
}
