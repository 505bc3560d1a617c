#include "srm/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include "json.hpp"
#include "srm/bergman.hpp"
#include "srm/fubini_study.hpp"
#include "srm/random.hpp"
#include "srm/section_ring.hpp"
#include "srm/subadditive.hpp"
#include "srm/tensor.hpp"

namespace srm {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error(ErrorKind::DimensionMismatch, "row width differs in table " + name);
  rows.push_back(std::move(row));
}

bool RunResult::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

std::string format_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const double v = std::get<double>(c);
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

CatalogEntry entry(std::string name, std::string type, std::vector<double> p = {}) {
  return {std::move(name), std::move(type), std::move(p)};
}

const CatalogEntry kRound = entry("round", "round");
const CatalogEntry kRamp = entry("ramp", "ramp", {0.3});
const CatalogEntry kMaxAffine = entry("max-affine", "max-affine", {0.0, 0.0, 0.5, 0.3, 1.0, 0.0});

std::vector<int> range(int a, int b, int step = 1) {
  std::vector<int> v;
  for (int k = a; k <= b; k += step) v.push_back(k);
  return v;
}

double round_hilb_entry(int k, int a) {
  return std::exp(std::lgamma(a + 1.0) + std::lgamma(k - a + 1.0) - std::lgamma(k + 2.0));
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

/// Per-run context: effective defaults, tables and assertions.
class Ctx {
public:
  Ctx(const ExperimentInfo& info, const ExperimentConfig& cfg, RunResult& out) : info_(info), cfg_(cfg), out_(out) {
    for (const auto& [k, v] : cfg.thresholds)
      if (!info.thresholds.count(k)) throw Error(ErrorKind::Config, "unknown threshold '" + k + "' for " + info.name);
    for (const auto& [k, v] : cfg.params)
      if (!info.params.count(k)) throw Error(ErrorKind::Config, "unknown param '" + k + "' for " + info.name);
    out.thresholds = info.thresholds;
    for (const auto& [k, v] : cfg.thresholds) out.thresholds[k] = v;
    out.params = info.params;
    for (const auto& [k, v] : cfg.params) out.params[k] = v;
    degrees = cfg.degrees.empty() ? info.degrees : cfg.degrees;
    if (cfg.kmax) std::erase_if(degrees, [&](int k) { return k > *cfg.kmax; });
    std::sort(degrees.begin(), degrees.end());
    degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
    if (!info.degrees.empty() && degrees.empty()) throw Error(ErrorKind::Config, "no degrees left after kmax filter");
    metrics = cfg.metrics.empty() ? info.metrics : cfg.metrics;
  }

  [[nodiscard]] double th(const std::string& k) const { return out_.thresholds.at(k); }
  [[nodiscard]] double par(const std::string& k) const { return out_.params.at(k); }
  [[nodiscard]] std::uint64_t seed() const { return cfg_.seed; }
  [[nodiscard]] const QuadratureScheme& quadrature() const { return cfg_.quadrature; }
  [[nodiscard]] int kmax() const { return degrees.empty() ? 0 : degrees.back(); }

  Table& table(std::string name, std::vector<std::string> columns) {
    tables_.push_back({std::move(name), std::move(columns), {}});
    return tables_.back();
  }
  void check(std::string name, bool ok, double value, double threshold, std::string detail = {}) {
    out_.assertions.push_back({std::move(name), ok, value, threshold, std::move(detail)});
  }
  const CatalogEntry& metric(std::size_t i) const {
    if (i >= metrics.size())
      throw Error(ErrorKind::Config, info_.name + " needs at least " + std::to_string(i + 1) + " metrics");
    return metrics[i];
  }

  /// Tables live in a deque while the experiment runs so references stay valid.
  void finish() { out_.tables.assign(std::make_move_iterator(tables_.begin()), std::make_move_iterator(tables_.end())); }

  std::vector<int> degrees;
  std::vector<CatalogEntry> metrics;

private:
  std::deque<Table> tables_;
  const ExperimentInfo& info_;
  const ExperimentConfig& cfg_;
  RunResult& out_;
};

// ---------------------------------------------------------------------------

void gram_golden(Ctx& c) {
  Table& t = c.table("gram", {"metric", "k", "a", "gram", "exact", "rel_err"});
  for (const CatalogEntry& e : c.metrics) {
    const MetricOnL h = make_metric(e);
    const bool round = e.type == "round";
    double worst = 0.0, min_diag = kInf;
    for (int k : c.degrees) {
      const HermitianNorm g = quadrature_gram(k, h, c.quadrature());
      for (int a = 0; a <= k; ++a) {
        const double v = g.gram()(a, a).real();
        const double exact = round ? round_hilb_entry(k, a) : kNaN;
        const double err = round ? std::abs(v - exact) / exact : kNaN;
        if (round) worst = std::max(worst, err);
        min_diag = std::min(min_diag, v);
        t.add({e.name, (long long)k, (long long)a, v, exact, err});
      }
    }
    if (round) c.check("golden-" + e.name, worst <= c.th("rel_tol"), worst, c.th("rel_tol"), "max relative error");
    else c.check("positive-" + e.name, min_diag > 0.0, min_diag, 0.0, "min diagonal entry");
  }
}

void isometry_ratio(Ctx& c) {
  Table& t = c.table("hermitian", {"metric", "k", "l", "gi_distance", "scaled_gi", "k_scaled_gi"});
  Table& b = c.table("banach", {"metric", "k", "l", "probes", "linf_lower", "linf_upper", "mult_ratio_max",
                                "l1_lower", "l1_upper"});
  const double cst = c.th("banach_c");
  for (const CatalogEntry& e : c.metrics) {
    HilbertFamily hilb(make_metric(e), c.quadrature());
    std::vector<double> xs, ys;
    for (int k : c.degrees) {
      const IsometryRatio r = asym_isometry_ratio(k, k, hilb);
      t.add({e.name, (long long)k, (long long)k, r.gi_distance, r.scaled_gi_distance, k * r.scaled_gi_distance});
      xs.push_back(k);
      ys.push_back(k * r.scaled_gi_distance);
    }
    if (xs.size() >= 2) {
      const auto [c0, c1] = fit_line(xs, ys);
      const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
      const double drift = std::abs(c1) * (xs.back() - xs.front()) / mean;
      c.check("flat-" + e.name, drift <= c.th("flat_tol"), drift, c.th("flat_tol"),
              "relative drift of the fitted line of k·d over the scan");
    }
    if (!hilb.metric().is_toric()) continue;
    BanachProbeOptions opt;
    opt.seed = c.seed();
    for (int k : c.degrees) {
      if (k > c.par("banach_kmax")) continue;
      const BanachIsometryRatio r = l1_linf_isometry_ratio(k, k, hilb, opt);
      b.add({e.name, (long long)k, (long long)k, (long long)r.probes, r.linf_lower, r.linf_upper, r.mult_ratio_max,
             r.l1_lower, r.l1_upper});
      const double env = cst * (2.0 / k);
      c.check("linf-" + e.name + "-" + std::to_string(k), r.linf_upper <= 1.0 + env, r.linf_upper, 1.0 + env,
              "upper estimate of the injective/sup ratio");
      c.check("l1-" + e.name + "-" + std::to_string(k),
              r.l1_lower >= 0.25 * (1.0 - env) && r.l1_upper <= 4.0 * (1.0 + env), r.l1_upper, 4.0 * (1.0 + env),
              "normalized projective/L1 ratio bracket [" + format_cell(r.l1_lower) + ", " + format_cell(r.l1_upper) +
                  "]");
    }
  }
}

void defect_scan(Ctx& c) {
  Table& t = c.table("defect", {"metric", "k", "l", "deviation", "scaled"});
  for (const CatalogEntry& e : c.metrics) {
    HilbertFamily hilb(make_metric(e), c.quadrature());
    std::vector<double> scaled;
    for (int k : c.degrees) {
      const double target = double(k) * k / (2 * k);
      const double dev = defect_deviation(multiplicative_defect(k, k, hilb), hilb(2 * k), target);
      const double s = dev * (2.0 * k) / (double(k) * k) * k;
      t.add({e.name, (long long)k, (long long)k, dev, s});
      scaled.push_back(s);
    }
    const std::size_t half = (scaled.size() + 1) / 2;
    const double c_half = *std::max_element(scaled.begin(), scaled.begin() + half);
    const double c_full = *std::max_element(scaled.begin(), scaled.end());
    const double ratio = c_full / c_half;
    c.check("stable-" + e.name, ratio <= c.th("stability"), ratio, c.th("stability"),
            "fitted constant over the full range / over the lower half");
  }
}

void tensor_laws(Ctx& c) {
  Rng rng = make_stream(c.seed(), 1);
  Table& ex = c.table("exact-laws", {"d1", "d2", "law", "max_error"});
  double worst = 0.0;
  for (Index d1 = 1; d1 <= 4; ++d1)
    for (Index d2 = 1; d2 <= 4; ++d2) {
      std::vector<CMatrix> samples;
      for (Index i = 0; i < d1; ++i)
        for (Index j = 0; j < d2; ++j) {
          CMatrix m = CMatrix::Zero(d1, d2);
          m(i, j) = 1.0;
          samples.push_back(m);
        }
      for (int s = 0; s < 4; ++s) samples.push_back(random_cmatrix(d1, d2, rng));
      double e1 = 0.0, e2 = 0.0, e3 = 0.0;
      const HermitianNorm id1 = HermitianNorm::identity(d1), id2 = HermitianNorm::identity(d2);
      for (const CMatrix& m : samples) {
        const TensorElement f = TensorElement::from_matrix(m);
        const double l1 = m.cwiseAbs().sum(), l2 = m.norm(), li = m.cwiseAbs().maxCoeff();
        e1 = std::max(e1, std::abs(projective_norm(f, NormHandle::l1(d1), NormHandle::l1(d2)).value - l1) / l1);
        e2 = std::max(e2, std::abs(hermitian_tensor(id1, id2).norm(f.coeffs) - l2) / l2);
        e3 = std::max(e3, std::abs(injective_norm(f, NormHandle::linf(d1), NormHandle::linf(d2)).value - li) / li);
      }
      ex.add({(long long)d1, (long long)d2, std::string("l1-projective"), e1});
      ex.add({(long long)d1, (long long)d2, std::string("l2-hermitian"), e2});
      ex.add({(long long)d1, (long long)d2, std::string("linf-injective"), e3});
      worst = std::max({worst, e1, e2, e3});
    }
  c.check("exact-laws", worst <= c.th("exact_tol"), worst, c.th("exact_tol"));

  const int n = static_cast<int>(c.par("random_tensors"));
  int fails = 0;
  double dual_worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Index d1 = 2 + static_cast<Index>(rng() % 3), d2 = 2 + static_cast<Index>(rng() % 3);
    const HermitianNorm n1(random_spd(d1, rng)), n2(random_spd(d2, rng));
    const TensorElement f = TensorElement::from_matrix(random_cmatrix(d1, d2, rng));
    const SandwichReport s =
        tensor_norm_sandwich_check(f, NormHandle::hermitian(n1), NormHandle::hermitian(n2), c.th("sandwich_tol"));
    fails += !s.holds;
    if (i < 100) dual_worst = std::max(dual_worst, duality_check(f, n1, n2).residual);
  }
  c.check("sandwich", fails == 0, fails, 0.0, "random tensors violating ε ≤ H ≤ π ≤ ε·dim factor");
  c.check("duality", dual_worst <= c.th("duality_tol"), dual_worst, c.th("duality_tol"));

  Table& lt = c.table("laws", {"trial", "kronecker", "transitivity", "hermitian_quotient", "lift", "fiber_min_ratio"});
  double trans = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const HermitianNorm a(random_spd(2, rng), monomial_basis(1)), b(random_spd(2, rng), monomial_basis(1)),
        d(random_spd(2, rng), monomial_basis(1));
    const LawsReport r = assoc_and_quotient_laws_check(a, b, d, MultMap(1, 1).matrix, MultMap({1, 1, 1}).matrix,
                                                       random_cmatrix(1, 2, rng), random_cmatrix(1, 2, rng),
                                                       c.seed() + static_cast<std::uint64_t>(trial));
    lt.add({(long long)trial, r.kronecker_associativity, r.quotient_transitivity, r.hermitian_quotient_product,
            r.projective_lift_residual, r.projective_fiber_min_ratio});
    trans = std::max({trans, r.quotient_transitivity, r.kronecker_associativity});
  }
  c.check("quotient-transitivity", trans <= c.th("transitivity_tol"), trans, c.th("transitivity_tol"));

  const HermitianNorm h1 = HermitianNorm::diagonal(RVector::Constant(2, 0.5), monomial_basis(1));
  const HermitianNorm q = quotient_tensor_norm(h1, h1, 1, 1);
  RVector expect(3);
  expect << 0.25, 0.125, 0.25;
  const RVector hilb2 = RVector::Map(std::vector<double>{1.0 / 3, 1.0 / 6, 1.0 / 3}.data(), 3);
  const double e_fix = (q.gram() - CMatrix(expect.cast<Complex>().asDiagonal())).cwiseAbs().maxCoeff();
  const double e_scale = (q.gram() - 0.75 * CMatrix(hilb2.cast<Complex>().asDiagonal())).cwiseAbs().maxCoeff();
  Table& fx = c.table("fixture", {"entry", "quotient", "expected"});
  for (int i = 0; i < 3; ++i) fx.add({(long long)i, q.gram()(i, i).real(), expect(i)});
  c.check("fixture-k1l1", std::max(e_fix, e_scale) <= c.th("fixture_tol"), std::max(e_fix, e_scale),
          c.th("fixture_tol"), "quotient gram vs diag(1/4, 1/8, 1/4) and (3/4)·Hilb_2");
}

void distance_quantization(Ctx& c) {
  const MetricOnL h0 = make_metric(c.metric(0)), h1 = make_metric(c.metric(1));
  const double computed = metric_distance(h0, h1).value;
  double analytic = c.par("analytic");
  if (std::isnan(analytic)) analytic = computed;
  c.check("analytic-vs-computed", std::abs(analytic - computed) <= 1e-6, std::abs(analytic - computed), 1e-6,
          "½ sup|u0 − u1| from the analytic value and from the potentials");
  HilbertFamily f0(h0, c.quadrature()), f1(h1, c.quadrature());
  Table& t = c.table("distance", {"k", "scaled_distance", "D", "rel_err"});
  std::vector<double> errs;
  for (int k : c.degrees) {
    const double s = goldman_iwahori(f0(k), f1(k)) / k;
    errs.push_back(std::abs(s - analytic) / analytic);
    t.add({(long long)k, s, analytic, errs.back()});
  }
  c.check("top-degree", errs.back() < c.th("rel_tol"), errs.back(), c.th("rel_tol"));
  c.check("decreasing", strictly_decreasing(errs), errs.back(), 0.0, "relative error strictly decreasing in k");
}

HermitianNorm diagonal_geodesic(const HermitianNorm& a, const HermitianNorm& b, double t) {
  const HermitianNorm g = norm_geodesic(GeodesicPath(a, b), t);
  const CMatrix& m = g.gram();
  const RVector d = m.diagonal().real();
  const double off = (m - CMatrix(d.cast<Complex>().asDiagonal())).cwiseAbs().maxCoeff() / d.maxCoeff();
  if (off > 1e-10) return g;
  return HermitianNorm::diagonal(d, monomial_basis(static_cast<int>(d.size()) - 1));
}

void geodesic_quantization(Ctx& c) {
  const MetricOnL h0 = make_metric(c.metric(0)), h1 = make_metric(c.metric(1));
  HilbertFamily f0(h0, c.quadrature()), f1(h1, c.quadrature());
  Table& t = c.table("geodesic", {"t", "k", "scaled_distance", "fs_deviation"});
  for (double s : {0.25, 0.5, 0.75}) {
    const MetricOnL ht = toric_geodesic(h0, h1, s);
    HilbertFamily ft(ht, c.quadrature());
    std::vector<double> d, fs;
    for (int k : c.degrees) {
      const HermitianNorm hk = diagonal_geodesic(f0(k), f1(k), s);
      d.push_back(goldman_iwahori(hk, ft(k)) / k);
      fs.push_back(metric_distance(fs_root(hk, k), ht).value);
      t.add({s, (long long)k, d.back(), fs.back()});
    }
    const std::string tag = format_cell(s);
    c.check("decreasing-t" + tag, strictly_decreasing(d), d.back(), 0.0, "(1/k)·d_∞ strictly decreasing");
    c.check("top-t" + tag, d.back() < c.th("top"), d.back(), c.th("top"));
    c.check("fs-decreasing-t" + tag, strictly_decreasing(fs), fs.back(), 0.0, "sup distance of FS roots decreasing");
  }
}

void tian_convergence(Ctx& c) {
  Table& t = c.table("tian", {"metric", "k", "deviation", "round_closed_form"});
  for (std::size_t i = 0; i < c.metrics.size(); ++i) {
    const CatalogEntry& e = c.metrics[i];
    const std::vector<TianRow> rows = tian_convergence_scan(make_metric(e), c.degrees, c.quadrature());
    std::vector<double> dev;
    double round_err = 0.0;
    for (const TianRow& r : rows) {
      const double closed = std::log(r.k + 1.0) / (2.0 * r.k);
      t.add({e.name, (long long)r.k, r.deviation, e.type == "round" ? closed : kNaN});
      round_err = std::max(round_err, std::abs(r.deviation - closed));
      dev.push_back(r.deviation);
    }
    if (e.type == "round") {
      c.check("round-closed-form", round_err <= c.th("round_tol"), round_err, c.th("round_tol"));
    } else if (i == 1) {
      // The second metric is the smooth toric perturbation under test.
      c.check("perturbation-top", dev.back() < c.th("toric_top"), dev.back(), c.th("toric_top"),
              "deviation at k = " + std::to_string(rows.back().k));
      const std::vector<double> tail(dev.begin() + static_cast<long>(dev.size() / 2), dev.end());
      c.check("perturbation-tail-decreasing", strictly_decreasing(tail), tail.back(), 0.0);
    }
  }
}

void bergman_decay(Ctx& c) {
  Table& dt = c.table("decay", {"metric", "k", "dist", "log_kernel", "fitted_c", "fitted_C"});
  Table& nt = c.table("near-diagonal", {"metric", "k", "max_residual", "k_times_residual", "fitted_C"});
  Table& pt = c.table("identities", {"metric", "k", "reproducing", "trace_error", "diagonal_error"});
  const double eps = c.par("eps");
  Rng rng = make_stream(c.seed(), 3);
  for (const CatalogEntry& e : c.metrics) {
    const MetricOnL h = make_metric(e);
    const DecayFit fit = off_diagonal_decay_scan(h, c.degrees, c.par("x0"));
    std::map<int, double> rate;
    for (std::size_t i = 0; i < fit.degrees.size(); ++i) rate[fit.degrees[i]] = fit.rate[i];
    for (const DecayRow& r : fit.rows)
      dt.add({e.name, (long long)r.k, r.dist, r.log_kernel, rate[r.k], std::exp(fit.log_c_envelope)});
    c.check("decay-" + e.name, fit.decays(), fit.fitted_c, 0.0, "fitted exponential rate c");
    c.check("doubling-" + e.name, fit.doubling_ratio <= c.th("doubling"), fit.doubling_ratio, c.th("doubling"),
            "rate ratio between k and 2k");

    std::vector<Complex> zs;
    for (double r : {0.0, 0.5 * eps, eps})
      for (int j = 0; j < 4; ++j) {
        zs.push_back(std::polar(r, kTwoPi * j / 4));
        if (r == 0.0) break;
      }
    double worst_k = 0.0, worst_repro = 0.0, worst_trace = 0.0, worst_diag = 0.0;
    for (int k : c.degrees) {
      const BergmanEvaluator ev(k, h, c.quadrature());
      // Envelope C/k·(1 + √k|Z| + √k|Z'|)⁴: the quartic term of the potential in normal coordinates.
      double res = 0.0, fitted = 0.0;
      for (const Point& x0 : {Point::from_moment(c.par("x0")), Point::from_moment(0.2, 1.0)}) {
        const NormalChart chart = NormalChart::at(h, x0);
        for (Complex z : zs)
          for (Complex zp : zs) {
            const double r = near_diagonal_residual(ev, chart, z, zp, eps);
            res = std::max(res, r);
            fitted = std::max(fitted, k * r / std::pow(1.0 + std::sqrt(double(k)) * (std::abs(z) + std::abs(zp)), 4));
          }
      }
      nt.add({e.name, (long long)k, res, k * res, fitted});
      worst_k = std::max(worst_k, fitted);

      std::vector<Point> pts;
      std::uniform_real_distribution<double> ux(0.0, 1.0), ut(0.0, kTwoPi);
      for (int i = 0; i < 20; ++i) pts.push_back(Point::from_moment(ux(rng), ut(rng)));
      const double repro = k <= 24 ? reproducing_residual(ev, SectionVector{k, random_cvector(k + 1, rng)}, pts) : kNaN;
      const double trace = std::abs(kernel_trace(ev) - (k + 1.0)) / (k + 1.0);
      double diag = kNaN;
      if (e.type == "round") {
        diag = 0.0;
        for (const Point& p : pts) diag = std::max(diag, std::abs(ev.diagonal(p) - (k + 1.0)) / (k + 1.0));
        worst_diag = std::max(worst_diag, diag);
      }
      if (k <= 24) worst_repro = std::max(worst_repro, repro);
      worst_trace = std::max(worst_trace, trace);
      pt.add({e.name, (long long)k, repro, trace, diag});
    }
    c.check("near-diagonal-" + e.name, worst_k <= c.th("residual_k"), worst_k, c.th("residual_k"),
            "max over the scan of the envelope constant C");
    c.check("reproducing-" + e.name, worst_repro <= c.th("reproducing"), worst_repro, c.th("reproducing"));
    c.check("trace-" + e.name, worst_trace <= c.th("trace"), worst_trace, c.th("trace"));
    if (e.type == "round") c.check("diagonal-round", worst_diag <= c.th("diagonal"), worst_diag, c.th("diagonal"));
  }
}

void projector_bound(Ctx& c) {
  Table& t = c.table("projector", {"metric", "k", "row_integral", "k_excess"});
  for (const CatalogEntry& e : c.metrics) {
    const MetricOnL h = make_metric(e);
    std::vector<double> gaps;
    double envelope_worst = 0.0, fitted_c = -kInf;
    for (int k : c.degrees) {
      const double r = projector_lp_bound(BergmanEvaluator(k, h, c.quadrature())).value;
      const double excess = k > 0 ? k * (r / 2.0 - 1.0) : kNaN;
      t.add({e.name, (long long)k, r, excess});
      if (k == 0) c.check("constant-projector-" + e.name, std::abs(r - 1.0) <= 1e-9, r, 1.0, "k = 0 row integral");
      if (k >= 8) envelope_worst = std::max(envelope_worst, r);
      if (k >= 4) {
        gaps.push_back(std::abs(r - 2.0));
        fitted_c = std::max(fitted_c, excess);
      }
    }
    c.check("envelope-" + e.name, envelope_worst <= c.th("envelope"), envelope_worst, c.th("envelope"),
            "row integrals for k ≥ 8");
    c.check("trend-" + e.name, strictly_decreasing(gaps), gaps.empty() ? 0.0 : gaps.back(), 0.0,
            "|row integral − 2| decreasing; fitted C = " + format_cell(fitted_c));
  }
}

void bernstein_markov(Ctx& c) {
  Table& t = c.table("bernstein-markov", {"metric", "k", "rho", "log_rate", "trace_floor"});
  for (const CatalogEntry& e : c.metrics) {
    const MetricOnL h = make_metric(e);
    std::vector<double> rates;
    double floor_gap = kInf, round_err = 0.0;
    for (int k : c.degrees) {
      const BernsteinMarkov bm = bernstein_markov_ratio(BergmanEvaluator(k, h, c.quadrature()));
      const double floor = std::sqrt(k + 1.0);
      t.add({e.name, (long long)k, bm.rho, bm.log_rate, floor});
      rates.push_back(bm.log_rate);
      floor_gap = std::min(floor_gap, bm.rho / floor - 1.0);
      round_err = std::max(round_err, std::abs(bm.rho - floor) / floor);
    }
    c.check("trace-floor-" + e.name, floor_gap >= -1e-9, floor_gap, -1e-9, "min of ρ_k/√(k+1) − 1");
    c.check("subexponential-" + e.name, strictly_decreasing(rates), rates.back(), 0.0, "log(ρ_k)/k decreasing");
    if (e.type == "round") c.check("round-rho", round_err <= 1e-9, round_err, 1e-9, "ρ_k = √(k+1)");
  }
}

void counterexamples(Ctx& c) {
  const int mmax = static_cast<int>(c.par("m_max"));
  Table& rt = c.table("middle-ratio", {"m", "ratio", "two_pow_m"});
  bool ratio_ok = true;
  for (int m = 1; m <= mmax; ++m) {
    const std::uint64_t r = counterexample_middle_ratio(m);
    const std::uint64_t p = std::uint64_t{1} << m;
    ratio_ok = ratio_ok && r >= p;
    rt.add({(long long)m, (long long)r, (long long)p});
  }
  c.check("middle-ratio", ratio_ok, 0.0, 0.0, "(2m+1)!/(m!m!) ≥ 2^m in integer arithmetic");

  Table& ft = c.table("fs-deviation", {"m", "a", "b", "formula", "direct", "hilbert_normalized", "inv_sqrt_m"});
  double formula_gap = 0.0, bound_excess = -kInf, normalized_gap = 0.0;
  for (int m = 1; m <= std::min(mmax, 10); ++m)
    for (double a : {0.1, 0.5, 1.0, 2.0})
      for (double b : {0.3, 1.0, 3.0}) {
        const double f = counterexample_deviation_formula(m, a, b);
        const double d = counterexample_deviation_direct(m, a, b);
        // Same identity with squared moduli and the (2m+1) normalization of Hilb_{2m}.
        const double central = std::exp(std::lgamma(2.0 * m + 1.0) - 2.0 * std::lgamma(m + 1.0));
        const double u = a * a, v = b * b;
        const double hn = (central - 1.0 / (2 * m + 1)) * std::pow(u * v, m) / std::pow(u + v, 2 * m);
        ft.add({(long long)m, a, b, f, d, hn, 1.0 / std::sqrt(m)});
        formula_gap = std::max(formula_gap, std::abs(f - d));
        normalized_gap = std::max(normalized_gap, std::abs(hn - d));
        bound_excess = std::max({bound_excess, f - 1.0 / std::sqrt(m), d - 1.0 / std::sqrt(m)});
      }
  c.check("formula-vs-direct", formula_gap <= c.th("formula_tol"), formula_gap, c.th("formula_tol"),
          "stated identity vs FS weights; the Hilb-normalized squared-modulus form differs by " +
              format_cell(normalized_gap));
  c.check("inverse-sqrt-bound", bound_excess <= 0.0, bound_excess, 0.0);

  Table& lt = c.table("lempert", {"delta", "d_inf", "sup_deviation", "formula_gap"});
  std::vector<double> devs;
  double dmin = kInf, gap = 0.0;
  for (double delta : {1.0, 0.1, 0.01}) {
    const LempertPair p = lempert_pair(delta);
    const double d = goldman_iwahori(p.h, p.hprime);
    const double dev = lempert_sup_deviation(p);
    double g = 0.0;
    for (const Point& x : fs_grid(24)) g = std::max(g, std::abs(lempert_fs_ratio(p, x) - lempert_ratio_formula(p, x)));
    lt.add({delta, d, dev, g});
    devs.push_back(dev);
    dmin = std::min(dmin, d);
    gap = std::max(gap, g);
  }
  c.check("lempert-distance", dmin >= std::log(2.0) - 1e-12, dmin, std::log(2.0), "d_∞ ≥ log 2 at every δ");
  c.check("lempert-fs-ratio", strictly_decreasing(devs), devs.back(), 0.0, "sup |FS ratio − 1| decreasing in δ");
  c.check("lempert-formula", gap <= c.th("formula_tol"), gap, c.th("formula_tol"));
}

void inductive_hilbert(Ctx& c) {
  Table& t = c.table("inductive", {"h1", "k", "distance", "scaled", "factor_residual"});
  const HermitianNorm round1 = HermitianNorm::diagonal(RVector::Constant(2, 0.5), monomial_basis(1));
  RVector d(2);
  d << c.par("h1_a"), c.par("h1_b");
  const HermitianNorm other = HermitianNorm::diagonal(d, monomial_basis(1));
  for (const auto& [name, h1] : {std::pair{std::string("round"), round1}, std::pair{std::string("diagonal"), other}}) {
    const std::vector<InductiveRow> rows = inductive_hilbert_scan(h1, c.degrees, c.quadrature());
    double factor = 0.0;
    std::vector<double> scaled;
    for (const InductiveRow& r : rows) {
      t.add({name, (long long)r.k, r.distance, r.scaled, r.factor_residual});
      factor = std::max(factor, r.factor_residual);
      scaled.push_back(r.scaled);
    }
    c.check("factor-" + name, factor <= c.th("factor_tol"), factor, c.th("factor_tol"),
            "Hilb_k(FS(H1)) = k!/(k+1)!·H_k at the gram level");
    if (name == "diagonal") {
      c.check("top-" + name, scaled.back() < c.th("top"), scaled.back(), c.th("top"));
      c.check("decreasing-" + name, strictly_decreasing(scaled), scaled.back(), 0.0);
    }
  }
}

void fekete(Ctx& c) {
  Table& t = c.table("fekete", {"family", "K", "estimate", "lower", "upper", "width", "limit"});
  auto sample = [](int kmax, auto fn) {
    SequenceSample s;
    for (int k = 1; k <= kmax; ++k) s.values[k] = fn(k);
    return s;
  };
  // 3k + 2√k with budgets 2√k on both sides.
  std::vector<double> widths;
  bool contains = true;
  for (int kk : {16, 64, 256}) {
    SequenceSample s = sample(kk, [](int k) { return 3.0 * k + 2.0 * std::sqrt(double(k)); });
    s.direction = Direction::Both;
    s.budget = s.super_budget = [](int k) { return 2.0 * std::sqrt(double(k)); };
    const FeketeEstimate e = fekete_limit(s);
    t.add({std::string("3k+2sqrt(k)"), (long long)kk, e.estimate, e.lower, e.upper, e.width, 3.0});
    contains = contains && e.lower <= 3.0 + 1e-12 && 3.0 <= e.upper + 1e-12;
    widths.push_back(e.width);
  }
  c.check("sqrt-family-bracket", contains && strictly_decreasing(widths), widths.back(), 0.0,
          "brackets contain 3 and shrink");
  {
    SequenceSample s = sample(64, [](int k) { return 1.75 * k; });
    s.direction = Direction::Both;
    s.budget = s.super_budget = [](int) { return 0.0; };
    const FeketeEstimate e = fekete_limit(s);
    t.add({std::string("1.75k"), 64LL, e.estimate, e.lower, e.upper, e.width, 1.75});
    c.check("linear-family", std::abs(e.width) <= 1e-12 && std::abs(e.estimate - 1.75) <= 1e-12, e.width, 1e-12);
  }
  {
    SequenceSample sub = sample(64, [](int k) { return 3.0 * k + 2.0 * std::sqrt(double(k)); });
    SequenceSample sq = sample(64, [](int k) { return double(k) * k; });
    const bool ok = check_almost_subadditive(sub, 1, {2, 3, 4, 5, 6}).ok();
    const AdditivityReport bad = check_almost_subadditive(sq, 1, {2, 3});
    c.check("subadditive-sqrt", ok, 0.0, 0.0, "no violations for 3k + 2√k with zero budget");
    c.check("superadditive-square", bad.violations.size() == static_cast<std::size_t>(bad.checked), bad.checked, 0.0,
            "k² violates at every split");
  }
  {
    // Negative control: k·log log(k + e) meets a_{m+n} ≤ a_m + a_n + (m+n)/log(m+n+e), whose
    // budget has a divergent Σ g_n/n², yet fails the √k budget.
    SequenceSample s = sample(1024, [](int k) { return k * std::log(std::log(k + std::numbers::e)); });
    const double be = bruijn_erdos_excess(s, [](int n) { return n / std::log(n + std::numbers::e); });
    s.budget = [](int k) { return std::sqrt(double(k)); };
    const AdditivityReport rep = check_almost_subadditive(s, 1, {2});
    Table& nc = c.table("negative-control", {"bruijn_erdos_excess", "checked", "violations"});
    nc.add({be, (long long)rep.checked, (long long)rep.violations.size()});
    c.check("negative-control", be <= 0.0 && !rep.ok(), static_cast<double>(rep.violations.size()), 0.0,
            "meets the weak condition and is flagged");
  }
  {
    FunctionFamilySample fam;
    for (int j = 0; j <= 20; ++j) fam.grid.push_back(j / 20.0);
    for (int k = 1; k <= 64; ++k) {
      std::vector<double> row;
      for (double x : fam.grid) row.push_back(k * std::sin(3 * x) + std::sqrt(double(k)) * std::cos(5 * x));
      fam.values[k] = row;
    }
    fam.budget = fam.super_budget = [](int k, std::size_t) { return 2.0 * std::sqrt(double(k)); };
    const UniformReport rep = uniform_convergence_check(fam);
    c.check("uniform-synthetic", rep.direction_ok && rep.decreasing, rep.deviation.rbegin()->second, 0.0);
  }
  // FS-scan family g_k = log(FS(Hilb_k(round))/FS(Hilb_k(h))) = r_{Hilb_k(h)} − r_{Hilb_k(round)}.
  {
    const MetricOnL h = make_metric(c.metric(0));
    const int kmax = c.kmax();
    FunctionFamilySample fam;
    std::vector<Point> pts;
    for (int j = 0; j <= 16; ++j) {
      fam.grid.push_back(j / 16.0);
      pts.push_back(Point::from_moment(j / 16.0));
    }
    for (int k = 1; k <= kmax; ++k) {
      const FSMetric a = fs_metric(quadrature_gram(k, h, c.quadrature()), k);
      RVector round(k + 1);
      for (int i = 0; i <= k; ++i) round(i) = round_hilb_entry(k, i);
      const FSMetric b = fs_metric(HermitianNorm::diagonal(round, monomial_basis(k)), k);
      std::vector<double> row;
      for (const Point& p : pts) row.push_back(a.relative_weight(p) - b.relative_weight(p));
      fam.values[k] = row;
    }
    const double cst = c.par("budget_c");
    fam.budget = fam.super_budget = [cst](int k, std::size_t) { return cst * std::log(k + 1.0); };
    const UniformReport rep = uniform_convergence_check(fam);
    Table& ut = c.table("fs-family", {"k", "sup_deviation"});
    for (const auto& [k, v] : rep.deviation) ut.add({(long long)k, v});
    c.check("fs-family-direction", rep.direction_ok, rep.failing_point, -1.0, "first failing grid point (−1: none)");
    std::vector<double> widths;
    for (int kk = kmax / 4; kk <= kmax; kk += std::max(1, kmax / 4)) {
      SequenceSample s;
      s.direction = Direction::Both;
      for (int k = 1; k <= kk; ++k) s.values[k] = fam.values[k][8];
      s.budget = s.super_budget = [cst](int k) { return cst * std::log(k + 1.0); };
      const FeketeEstimate e = fekete_limit(s);
      t.add({std::string("fs-scan"), (long long)kk, e.estimate, e.lower, e.upper, e.width, kNaN});
      widths.push_back(e.width);
    }
    c.check("fs-family-brackets", strictly_decreasing(widths), widths.back(), 0.0, "bracket widths shrink with K");
  }
}

void mabuchi_distance(Ctx& c) {
  const MetricOnL h0 = make_metric(c.metric(0)), h1 = make_metric(c.metric(1));
  const double d = metric_distance(h0, h1).value;
  double analytic = c.par("analytic");
  if (std::isnan(analytic)) analytic = d;
  const int steps = static_cast<int>(c.par("path_steps"));
  Table& pt = c.table("path", {"t", "dist_from_start", "dist_to_end", "t_times_D"});
  double length = 0.0, segment_gap = 0.0;
  MetricOnL prev = h0;
  for (int i = 1; i <= steps; ++i) {
    const double t = double(i) / steps;
    const MetricOnL ht = i == steps ? h1 : toric_geodesic(h0, h1, t);
    length += metric_distance(prev, ht).value;
    prev = ht;
    if (i % std::max(1, steps / 8) == 0) {
      const double a = metric_distance(h0, ht).value, b = metric_distance(ht, h1).value;
      pt.add({t, a, b, t * d});
      segment_gap = std::max({segment_gap, std::abs(a - t * d), std::abs(b - (1 - t) * d)});
    }
  }
  c.check("analytic", std::abs(d - analytic) <= c.th("length_tol"), std::abs(d - analytic), c.th("length_tol"),
          "½ sup|u0 − u1| vs the analytic value");
  c.check("geodesic-length", std::abs(length - d) <= c.th("length_tol"), std::abs(length - d), c.th("length_tol"),
          "½∫‖u̇‖∞ along the geodesic vs ½ sup|u0 − u1|");
  c.check("constant-speed", segment_gap <= c.th("length_tol"), segment_gap, c.th("length_tol"),
          "dist(h0, h_t) = tD and dist(h_t, h1) = (1 − t)D");

  HilbertFamily f0(h0, c.quadrature()), f1(h1, c.quadrature());
  Table& qt = c.table("quantized", {"k", "scaled_distance", "D", "rel_err"});
  std::vector<double> errs;
  for (int k : c.degrees) {
    const double s = goldman_iwahori(f0(k), f1(k)) / k;
    errs.push_back(std::abs(s - d) / d);
    qt.add({(long long)k, s, d, errs.back()});
  }
  c.check("quantized-decreasing", strictly_decreasing(errs), errs.back(), 0.0,
          "(1/k)·d_∞(Hilb_k) approaches the path distance");
}

using Runner = std::function<void(Ctx&)>;

struct Registered {
  ExperimentInfo info;
  Runner run;
};

const std::vector<Registered>& registry() {
  static const std::vector<Registered> r = {
      {{"gram-golden", "Gram matrices of Hilb_k(h) in the monomial basis against a!b!/(k+1)! for the round metric",
        "max relative error of every diagonal entry ≤ rel_tol; other metrics: positive diagonal", range(0, 30),
        {kRound}, {{"rel_tol", 1e-10}}, {}},
       gram_golden},
      {{"isometry-ratio",
        "Distance between the scaled quotient [Hilb_k ⊗ Hilb_l] and Hilb_{k+l}, plus L1/Linf tensor ratio brackets",
        "k·d has no growth trend (fitted drift ≤ flat_tol); Banach ratios inside 1 + C/k and [1/4, 4]·(1 ± C/k)",
        {4, 8, 16, 32}, {kRound, kRamp}, {{"flat_tol", 0.2}, {"banach_c", 1.0}}, {{"banach_kmax", 8.0}}},
       isometry_ratio},
      {{"defect-scan", "Operator norm of A_{k,l} − (kl/(k+l))·Id relative to Hilb_{k+l}, scaled by min(k, l)(k+l)/(kl)",
        "max scaled deviation over the full range within `stability` × that over the lower half",
        {4, 6, 8, 12, 16, 20, 24, 28, 32}, {kRound, kRamp}, {{"stability", 2.0}}, {}},
       defect_scan},
      {{"tensor-laws", "Tensor norm identities: l1/l2/linf laws, sandwich, duality, quotient transitivity, k = l = 1 fixture",
        "all residuals below their tolerances", {}, {},
        {{"exact_tol", 1e-12}, {"sandwich_tol", 1e-9}, {"duality_tol", 1e-8}, {"transitivity_tol", 1e-9},
         {"fixture_tol", 1e-10}},
        {{"random_tensors", 1000.0}}},
       tensor_laws},
      {{"distance-quantization", "(1/k)·d_∞(Hilb_k(h0), Hilb_k(h1)) against ½ sup|u0 − u1| for a toric pair",
        "relative error < rel_tol at the top degree and strictly decreasing", {4, 8, 16, 32}, {kRound, kRamp},
        {{"rel_tol", 0.1}}, {{"analytic", 0.15}}},
       distance_quantization},
      {{"geodesic-quantization",
        "Norm geodesics between Hilb_k(h0), Hilb_k(h1) against Hilb_k of the toric geodesic h_t, t ∈ {1/4, 1/2, 3/4}",
        "(1/k)·d_∞ strictly decreasing and < top at the top degree; FS-root sup distance decreasing",
        {4, 8, 16, 32}, {kRound, kRamp}, {{"top", 0.1}}, {}},
       geodesic_quantization},
      {{"tian-convergence", "½ sup distance between FS(Hilb_k(h))^{1/k} and h",
        "round: equals log(k+1)/(2k); second metric: < toric_top at the top degree, decreasing on the tail",
        {4, 8, 12, 16, 20, 24, 28, 32}, {kRound, kRamp, kMaxAffine}, {{"round_tol", 1e-9}, {"toric_top", 0.05}}, {}},
       tian_convergence},
      {{"bergman-decay",
        "Bergman kernel: exponential off-diagonal decay, near-diagonal model comparison, reproducing and trace identities",
        "rate c > 0 with doubling ratio ≤ doubling; k·residual ≤ residual_k; identities within tolerance",
        {8, 16, 32, 64}, {kRound, kRamp},
        {{"doubling", 2.0}, {"residual_k", 3.0}, {"reproducing", 1e-7}, {"trace", 1e-6}, {"diagonal", 1e-9}},
        {{"eps", 0.1}, {"x0", 0.5}}},
       bergman_decay},
      {{"projector-bound", "L1 row integrals max_x0 ∫|B_k(x0, x)| dv(x) of the Bergman projector",
        "k = 0 gives 1; rows ≤ envelope for k ≥ 8; |row − 2| decreasing", {0, 4, 8, 16, 32}, {kRound, kRamp},
        {{"envelope", 3.0}}, {}},
       projector_bound},
      {{"bernstein-markov", "ρ_k = sup_x √B_k(x, x) and the rate log(ρ_k)/k",
        "ρ_k ≥ √(k+1); log(ρ_k)/k decreasing; round: ρ_k = √(k+1)", {4, 8, 16, 32, 64},
        {kRound, kRamp, kMaxAffine}, {}, {}},
       bernstein_markov},
      {{"counterexamples", "Graded norm equivalent to no Hilbert norm with converging FS roots; Lempert's degree-2 pair",
        "integer middle ratio ≥ 2^m; stated deviation identity vs FS weights; 1/√m bound; Lempert d_∞ ≥ log 2 with "
        "FS ratio → 1",
        {}, {}, {{"formula_tol", 1e-10}}, {{"m_max", 20.0}}},
       counterexamples},
      {{"inductive-hilbert", "Iterated quotients H_k = [H1 ⊗ ⋯ ⊗ H1] against Hilb_k(FS(H1))",
        "gram identity Hilb_k(FS(H1)) = k!/(k+1)!·H_k; non-round H1: (1/k)·d_∞ decreasing and < top",
        range(1, 16), {}, {{"factor_tol", 1e-10}, {"top", 0.1}}, {{"h1_a", 1.0}, {"h1_b", 4.0}}},
       inductive_hilbert},
      {{"fekete", "Almost sub-additive sequences: Fekete brackets, Dini-type uniform convergence, negative control",
        "brackets contain the analytic limits and shrink; negative control flagged; FS-scan family passes",
        range(1, 24), {kRamp}, {}, {{"budget_c", 2.0}}},
       fekete},
      {{"mabuchi-distance", "Length of the toric geodesic in the sup norm against ½ sup|u0 − u1| and its quantization",
        "path length and constant speed within length_tol; (1/k)·d_∞(Hilb_k) converging",
        {4, 8, 16, 32}, {kRamp, entry("mixed", "mixed", {0.5})}, {{"length_tol", 1e-6}},
        {{"analytic", 0.25}, {"path_steps", 32.0}}},
       mabuchi_distance},
  };
  return r;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_list() {
  static const std::vector<ExperimentInfo> v = [] {
    std::vector<ExperimentInfo> out;
    for (const Registered& r : registry()) out.push_back(r.info);
    return out;
  }();
  return v;
}

const ExperimentInfo& describe_experiment(const std::string& name) {
  for (const ExperimentInfo& i : experiment_list())
    if (i.name == name) return i;
  throw Error(ErrorKind::Config, "unknown experiment '" + name + "'");
}

std::string describe_text(const ExperimentInfo& info) {
  std::string s = info.name + "\n  " + info.summary + "\n  asserts: " + info.assertions + "\n";
  if (!info.degrees.empty()) {
    s += "  degrees:";
    for (int k : info.degrees) s += " " + std::to_string(k);
    s += "\n";
  }
  if (!info.metrics.empty()) {
    s += "  metrics:";
    for (const auto& m : info.metrics) s += " " + m.name;
    s += "\n";
  }
  for (const auto& [k, v] : info.thresholds) s += "  threshold " + k + " = " + format_cell(v) + "\n";
  for (const auto& [k, v] : info.params) s += "  param " + k + " = " + format_cell(v) + "\n";
  return s;
}

RunResult run_experiment(const std::string& name, const ExperimentConfig& config) {
  if (!config.experiment.empty() && config.experiment != name)
    throw Error(ErrorKind::Config, "config is for '" + config.experiment + "', not '" + name + "'");
  for (const Registered& r : registry()) {
    if (r.info.name != name) continue;
    RunResult out;
    out.experiment = name;
    Ctx ctx(r.info, config, out);
    r.run(ctx);
    ctx.finish();
    return out;
  }
  throw Error(ErrorKind::Config, "unknown experiment '" + name + "'");
}

std::string write_outputs(const RunResult& result, const ExperimentConfig& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json m;
  m["experiment"] = result.experiment;
  m["version"] = kVersion;
  m["config_hash"] = config_hash(config);
  m["seed"] = config.seed;
  auto files = nlohmann::ordered_json::array();
  for (const Table& t : result.tables) {
    const std::string file = t.name + ".csv";
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir / file).string());
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
      out << "\n";
    }
    files.push_back({{"table", t.name}, {"file", file}, {"rows", t.rows.size()}});
  }
  m["tables"] = files;
  auto asserts = nlohmann::ordered_json::array();
  for (const Assertion& a : result.assertions)
    asserts.push_back({{"name", a.name},
                       {"passed", a.passed},
                       {"value", format_cell(a.value)},
                       {"threshold", format_cell(a.threshold)},
                       {"detail", a.detail}});
  m["assertions"] = asserts;
  nlohmann::ordered_json th, pa;
  for (const auto& [k, v] : result.thresholds) th[k] = format_cell(v);
  for (const auto& [k, v] : result.params) pa[k] = format_cell(v);
  m["thresholds"] = th;
  m["params"] = pa;
  m["passed"] = result.passed();
  const std::string text = m.dump(2) + "\n";
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write manifest");
  out << text;
  return text;
}

}  // namespace srm
