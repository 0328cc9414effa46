// Copyright 2026 The toral-decay Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "toral/error.hpp"
#include "toral/interval.hpp"
#include "toral/lacunary.hpp"
#include "toral/parallel.hpp"
#include "toral/stochastic.hpp"
#include "toral/tiling.hpp"

#ifndef TORAL_DECAY_VERSION
#define TORAL_DECAY_VERSION "0.0.0"
#endif

namespace toral::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kBadInput, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kBadInput, "cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::kBadInput, "write failed for " + path);
}

// Either a file or stdout.
void Emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    WriteFile(path, text);
  }
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

Json ToJson(const IntVector& v) {
  Json a = Json::array();
  for (const auto& e : v) {
    if (e >= std::numeric_limits<long long>::min() &&
        e <= std::numeric_limits<long long>::max()) {
      a.push_back(e.convert_to<long long>());
    } else {
      a.push_back(e.str());
    }
  }
  return a;
}

Json FitJson(const ModelFit& f) {
  Json j;
  j["model"] = RateModelName(f.model);
  j["parameter"] = f.parameter;
  j["amplitude"] = f.amplitude;
  j["residual"] = f.residual;
  j["rows"] = f.rows;
  return j;
}

Json RateFitJson(const RateFit& fit) {
  Json j;
  j["best"] = FitJson(fit.best);
  j["candidates"] = Json::array();
  for (const auto& c : fit.candidates) j["candidates"].push_back(FitJson(c));
  return j;
}

double LogLogSlope(const std::vector<std::pair<double, double>>& xy) {
  if (xy.size() < 2) return std::nan("");
  double sx = 0, sy = 0;
  for (auto [x, y] : xy) {
    sx += std::log(x);
    sy += std::log(y);
  }
  const double m = static_cast<double>(xy.size());
  double sxx = 0, sxy = 0;
  for (auto [x, y] : xy) {
    sxx += (std::log(x) - sx / m) * (std::log(x) - sx / m);
    sxy += (std::log(x) - sx / m) * (std::log(y) - sy / m);
  }
  return sxx > 0 ? sxy / sxx : std::nan("");
}

std::optional<RateFit> TryFit(const DecayReport& report, Json& why) {
  try {
    return FitRate(report);
  } catch (const Error& e) {
    why = e.what();
    return std::nullopt;
  }
}

DecayReport TailReport(const std::vector<TailNorms>& tails) {
  DecayReport r;
  r.mode = DecayMode::kTransferNorm;
  for (std::size_t n = 1; n < tails.size(); ++n) {
    DecayRow row;
    row.n = static_cast<unsigned>(n);
    row.value = tails[n].l2;
    row.raw = row.value;
    r.rows.push_back(row);
  }
  return r;
}

NormKind ParseNorm(const std::string& s) {
  if (s == "l2") return NormKind::kL2;
  if (s == "sup") return NormKind::kSup;
  throw Error(ErrorKind::kBadInput, "unknown norm " + s);
}

std::vector<double> ParseNumbers(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cells(line);
    while (std::getline(cells, token, ',')) {
      token = Trim(token);
      if (token.empty()) continue;
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        if (out.empty()) continue;  // header row
        throw Error(ErrorKind::kBadInput, "not a number: " + token);
      }
      out.push_back(v);
    }
  }
  return out;
}

unsigned ResolveThreads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("TORAL_DECAY_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) {
      return static_cast<unsigned>(v);
    }
    throw Error(ErrorKind::kBadInput,
                std::string("TORAL_DECAY_THREADS must be a positive integer, got ") + env);
  }
  return DefaultThreadCount();
}

// Options that do not change the experiment are kept out of the hash.
const std::set<std::string> kUnhashed = {"--help", "--threads", "--seed",
                                         "--out", "--points", "--plot",
                                         "--samples-out"};
const std::set<std::string> kFileInputs = {"--f", "--g", "--function",
                                           "--design"};

std::uint64_t ConfigHash(const CLI::App& sub) {
  std::map<std::string, std::string> canon;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name();
    if (kUnhashed.count(name)) continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) {
        if (!value.empty()) value += ',';
        if (kFileInputs.count(name)) {
          char buf[17];
          std::snprintf(buf, sizeof buf, "%016llx",
                        static_cast<unsigned long long>(Fnv1a(ReadFile(r))));
          value += buf;
        } else {
          value += r;
        }
      }
    } else {
      value = opt->get_default_str();
    }
    canon[name] = value;
  }
  std::string text = sub.get_name() + "\n";
  for (const auto& [k, v] : canon) text += k + "=" + v + "\n";
  return Fnv1a(text);
}

struct Common {
  std::string matrix;
  std::string out;
  unsigned threads = 0;
  std::uint64_t seed = 1;
};

ExpandingMatrix LoadMatrix(const std::string& spec) {
  std::string text = spec;
  std::error_code ec;
  if (std::filesystem::is_regular_file(spec, ec)) text = ReadFile(spec);
  return ValidateExpanding(ParseMatrix(text));
}

TrigPolynomial LoadPolynomial(const std::string& path, std::size_t dim) {
  return TrigPolynomial::FromJson(ReadFile(path), dim);
}

std::string CsvHeader(const RunMeta& meta, const std::vector<std::string>& cols,
                      const std::vector<std::string>& extra = {}) {
  std::string s = meta.HeaderBlock();
  for (const auto& e : extra) s += "# " + e + "\n";
  for (std::size_t i = 0; i < cols.size(); ++i) {
    s += (i ? "," : "") + cols[i];
  }
  return s + "\n";
}

std::string CsvRow(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

// --- subcommands -----------------------------------------------------------

void MatrixInfo(const Common& c, const RunMeta& meta, std::ostream& out) {
  const ExpandingMatrix a = LoadMatrix(c.matrix);
  const DigitSet d = MakeDigitSet(a);
  Json j;
  j["meta"] = meta.ToJson();
  j["d"] = a.dim();
  j["q"] = a.q();
  j["lambda"] = a.lambda_min();
  j["lambda_tol"] = a.lambda_tol();
  j["similarity"] = a.IsSimilarity();
  j["eigenvalues"] = Json::array();
  for (const auto& e : a.eigenvalues()) {
    j["eigenvalues"].push_back(Json::array({e.real(), e.imag()}));
  }
  j["digits"] = Json::array();
  for (const auto& g : d.digits) j["digits"].push_back(ToJson(g));
  Emit(Dump(j), c.out, out);
}

void Digits(const Common& c, const RunMeta& meta, std::ostream& out) {
  const DigitSet d = MakeDigitSet(LoadMatrix(c.matrix));
  Json j;
  j["meta"] = meta.ToJson();
  j["digits"] = Json::array();
  for (const auto& g : d.digits) j["digits"].push_back(ToJson(g));
  Emit(Dump(j), c.out, out);
}

struct TileArgs {
  unsigned level = 8;
  std::size_t samples = 10000;
  std::string points;
};

void Tile(const Common& c, const TileArgs& t, const RunMeta& meta,
          std::ostream& out) {
  const DigitSet d = MakeDigitSet(LoadMatrix(c.matrix));
  const TileApproximation tile = TilePoints(d, t.level);
  const CoverageStats cov = CheckTiling(tile, t.samples, c.seed, c.threads);
  if (!t.points.empty()) {
    std::vector<std::string> cols;
    for (std::size_t i = 1; i <= tile.dim(); ++i) cols.push_back("x" + std::to_string(i));
    std::string csv = CsvHeader(meta, cols);
    std::vector<std::string> cells(tile.dim());
    for (std::size_t p = 0; p < tile.size(); ++p) {
      const auto pt = tile.point(p);
      for (std::size_t i = 0; i < tile.dim(); ++i) cells[i] = Num(pt[i]);
      csv += CsvRow(cells);
    }
    WriteFile(t.points, csv);
  }
  Json j;
  j["meta"] = meta.ToJson();
  j["level"] = t.level;
  j["points"] = tile.size();
  j["cell_radius"] = tile.cell_radius;
  j["attractor_radius"] = tile.attractor_radius;
  j["coverage"] = {{"samples", cov.samples},
                   {"window", cov.window},
                   {"degenerate", cov.degenerate},
                   {"histogram", cov.histogram},
                   {"fraction_count_0", cov.FractionWithCount(0)},
                   {"fraction_count_1", cov.FractionWithCount(1)}};
  j["self_affinity_mismatch"] = t.level >= 1 ? CheckSelfAffinity(tile) : 0.0;
  Emit(Dump(j), c.out, out);
}

struct TransferArgs {
  std::string function;
  unsigned steps = 4;
  std::string emit = "norms";
  std::string norm = "l2";
};

void Transfer(const Common& c, const TransferArgs& t, const RunMeta& meta,
              std::ostream& out) {
  const ExpandingMatrix a = LoadMatrix(c.matrix);
  const TrigPolynomial f = LoadPolynomial(t.function, a.dim());
  std::vector<double> radii;
  for (unsigned n = 0; n <= t.steps; ++n) {
    radii.push_back(std::pow(a.lambda_min(), -static_cast<double>(n)));
  }
  if (t.emit == "coeffs") {
    Json j;
    j["meta"] = meta.ToJson();
    j["steps"] = t.steps;
    j["coefficients"] = Json::parse(TransferFourier(f, a, t.steps).ToJson());
    Emit(Dump(j), c.out, out);
  } else if (t.emit == "norms") {
    const TrigPolynomial fc = f.Centered();
    const ModulusCurve omega = Modulus(fc, NormKind::kL2, radii, c.threads);
    std::string csv = CsvHeader(meta, {"n", "norm_L2", "norm_sup_lower",
                                       "norm_sup_upper", "omega_L2",
                                       "bound_ratio"});
    for (unsigned n = 0; n <= t.steps; ++n) {
      const TrigPolynomial ln = TransferFourier(f, a, n);
      const SupNormBracket sup = NormSup(ln, c.threads);
      const double centered = NormL2(TransferFourier(fc, a, n));
      const double w = omega.values[n];
      csv += CsvRow({std::to_string(n), Num(NormL2(ln)), Num(sup.lower),
                     Num(sup.upper), Num(w),
                     w > 0 ? Num(centered / w) : ""});
    }
    Emit(csv, c.out, out);
  } else if (t.emit == "modulus") {
    const ModulusCurve curve = Modulus(f, ParseNorm(t.norm), radii, c.threads);
    std::string csv = CsvHeader(meta, {"delta", "omega"});
    for (std::size_t i = 0; i < curve.radii.size(); ++i) {
      csv += CsvRow({Num(curve.radii[i]), Num(curve.values[i])});
    }
    Emit(csv, c.out, out);
  } else {
    throw Error(ErrorKind::kBadInput, "--emit must be coeffs, norms or modulus");
  }
}

struct DecayArgs {
  std::string f, g;
  unsigned nmax = 10;
  std::string mode = "correlation";
  std::string norm = "l2";
  std::size_t mc_samples = 0;
  std::string plot;
};

void Decay(const Common& c, const DecayArgs& d, const RunMeta& meta,
           std::ostream& out) {
  const ExpandingMatrix a = LoadMatrix(c.matrix);
  const TrigPolynomial f = LoadPolynomial(d.f, a.dim());
  const TrigPolynomial g = d.g.empty() ? f : LoadPolynomial(d.g, a.dim());
  DecayMode mode;
  if (d.mode == "correlation") {
    mode = DecayMode::kCorrelation;
  } else if (d.mode == "transfer") {
    mode = DecayMode::kTransferNorm;
  } else {
    throw Error(ErrorKind::kBadInput, "--mode must be correlation or transfer");
  }
  DecayReport report = MakeDecayReport(f, g, a, d.nmax, mode, ParseNorm(d.norm), c.threads);
  Json why;
  report.fit = TryFit(report, why);

  std::vector<std::string> cols = {"n", "value", "bound", "ratio"};
  const bool mc = d.mc_samples > 0 && mode == DecayMode::kCorrelation;
  if (mc) {
    cols.push_back("mc_value");
    cols.push_back("mc_stderr");
  }
  std::string csv = CsvHeader(meta, cols);
  const TrigPolynomial fc = report.centered ? f.Centered() : f;
  for (const auto& row : report.rows) {
    std::vector<std::string> cells = {std::to_string(row.n), Num(row.value),
                                      Num(row.bound), Num(row.ratio)};
    if (mc) {
      const auto est = CorrelationMonteCarlo(fc, g, a, row.n, d.mc_samples,
                                             c.seed, c.threads);
      cells.push_back(Num(std::abs(est.value)));
      cells.push_back(Num(est.standard_error));
    }
    csv += CsvRow(cells);
  }
  Json footer;
  footer["fitted_constant"] = report.fitted_constant;
  footer["bound_violations"] = report.BoundViolations();
  footer["centered"] = report.centered;
  if (report.fit) {
    footer["fit"] = RateFitJson(*report.fit);
  } else {
    footer["fit"] = nullptr;
    footer["fit_error"] = why;
  }
  csv += "# " + footer.dump() + "\n";
  Emit(csv, c.out, out);
  if (!d.plot.empty()) EmitPlotData(report, d.plot, meta);
}

struct LacunaryArgs {
  std::string h = "1";
  std::string family = "power";
  double param = 2.0;
  unsigned nmax = 20;
  std::size_t truncation = 0;
  std::string design;
  std::string design_norm = "l2";
  std::size_t measure_terms = 0;
  std::string plot;
};

void Lacunary(const Common& c, const LacunaryArgs& l, const RunMeta& meta,
              std::ostream& out) {
  const ExpandingMatrix a = LoadMatrix(c.matrix);
  const IntVector h = ParseVector(l.h);
  LacunarySpec spec;
  std::vector<double> designed;
  if (!l.design.empty()) {
    const auto targets = ParseNumbers(ReadFile(l.design));
    const DesignNorm norm = l.design_norm == "sup" ? DesignNorm::kSup
                            : l.design_norm == "l2"
                                ? DesignNorm::kL2
                                : throw Error(ErrorKind::kBadInput,
                                              "--design-norm must be sup or l2");
    designed = DesignForRate(targets, norm);
    spec = MakeExplicitSpec(a, h, designed);
  } else {
    const CoefficientFamily family = ParseFamily(l.family);
    if (family == CoefficientFamily::kExplicit) {
      throw Error(ErrorKind::kBadInput, "the explicit family needs --design");
    }
    std::optional<std::size_t> k;
    if (l.truncation > 0) k = l.truncation;
    spec = MakeLacunarySpec(a, h, family, l.param, k);
  }
  const auto tails = LacunaryTailNormsRange(spec, l.nmax);

  // Measured norms use the first K_m terms only.
  std::size_t km = l.measure_terms > 0 ? l.measure_terms : l.nmax + 24;
  if (const auto last = spec.LastTerm()) km = std::min(km, *last);
  LacunarySpec measured = spec;
  if (spec.family == CoefficientFamily::kExplicit) {
    measured.coefficients.resize(std::min(km, measured.coefficients.size()));
  } else {
    measured.truncation = km;
  }
  const TrigPolynomial hk = LacunaryBuild(measured);
  const bool similar = a.IsSimilarity();

  std::vector<std::string> extra = {"family " + FamilyName(spec.family),
                                    "measured_terms " + std::to_string(km)};
  std::string csv = CsvHeader(meta, {"n", "l2_tail", "l1_tail", "prop2_sup_bound",
                                     "prop2_l2_bound", "measured_l2_norm"},
                              extra);
  for (unsigned n = 0; n <= l.nmax; ++n) {
    std::string sup, l2;
    if (similar) {
      const Prop2Bounds b = ModulusBoundsProp2(spec, n);
      sup = Num(b.sup_bound);
      l2 = Num(b.l2_bound);
    }
    csv += CsvRow({std::to_string(n), Num(tails[n].l2), Num(tails[n].l1), sup,
                   l2, Num(NormL2(TransferFourier(hk, a, n)))});
  }
  if (!designed.empty()) {
    Json j = designed;
    csv += "# {\"designed_coefficients\":" + j.dump() + "}\n";
  }
  Emit(csv, c.out, out);
  if (!l.plot.empty()) {
    DecayReport report = TailReport(tails);
    Json why;
    report.fit = TryFit(report, why);
    EmitPlotData(report, l.plot, meta);
  }
}

struct CltArgs {
  std::string f;
  std::size_t horizon = 2000;
  std::size_t samples = 5000;
  std::string samples_out;
};

void Clt(const Common& c, const CltArgs& t, const RunMeta& meta,
         std::ostream& out) {
  const ExpandingMatrix a = LoadMatrix(c.matrix);
  const TrigPolynomial f = LoadPolynomial(t.f, a.dim());
  const CltExperiment e = BirkhoffSamples(f, a, t.horizon, t.samples, c.seed, c.threads);
  Json j;
  j["meta"] = meta.ToJson();
  j["horizon"] = e.horizon;
  j["samples"] = e.sample_count;
  j["sigma2"] = e.sigma2;
  if (e.sigma2 > 0) {
    j["ks"] = KsStatistic(e);
  } else {
    j["ks"] = nullptr;
    j["ks_skipped"] = "ZeroVariance: sigma^2 = 0";
  }
  j["sample_mean"] = e.SampleMean();
  j["sample_var"] = e.SampleVariance();
  if (!t.samples_out.empty()) {
    std::string csv = CsvHeader(meta, {"value"});
    for (double v : e.samples) csv += Num(v) + "\n";
    WriteFile(t.samples_out, csv);
  }
  Emit(Dump(j), c.out, out);
}

struct UlamArgs {
  std::string op = "decay";
  unsigned nmax = 12;
  std::size_t truncation = 0;
  std::size_t horizon = 2000;
  std::size_t samples = 5000;
  std::vector<double> deltas;
  std::string plot;
};

void Ulam(const Common& c, const UlamArgs& u, const RunMeta& meta,
          std::ostream& out) {
  if (u.op == "decay") {
    const double needed = std::ldexp(1.0, static_cast<int>(std::min(u.nmax, 60u)) + 4);
    const std::size_t k = u.truncation > 0
                              ? u.truncation
                              : static_cast<std::size_t>(std::max(1e5, needed));
    const DecayReport r = UvnDecayNorms(u.nmax, k);
    std::string csv = CsvHeader(meta, {"n", "norm", "pow2_ratio"},
                                {"truncation " + std::to_string(k)});
    for (const auto& row : r.rows) {
      csv += CsvRow({std::to_string(row.n), Num(row.value), Num(row.ratio)});
    }
    Emit(csv, c.out, out);
    if (!u.plot.empty()) EmitPlotData(r, u.plot, meta);
  } else if (u.op == "modulus") {
    std::vector<double> deltas = u.deltas;
    if (deltas.empty()) {
      for (int i = 0; i <= 12; ++i) deltas.push_back(std::pow(10.0, -4 + i / 4.0));
    }
    const SqrtDeltaModulus m = UvnModulusSqrtDelta(deltas);
    std::string csv = CsvHeader(meta, {"delta", "omega"});
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      csv += CsvRow({Num(m.curve.radii[i]), Num(m.curve.values[i])});
    }
    csv += "# {\"exponent\":" + Num(m.exponent) + "}\n";
    Emit(csv, c.out, out);
    if (!u.plot.empty()) EmitPlotData(m.curve, u.plot, meta);
  } else if (u.op == "lyapunov") {
    const std::size_t k = u.truncation > 0 ? u.truncation : kDefaultLogTruncation;
    const LyapunovReport r = LyapunovClt(u.horizon, u.samples, c.seed, c.threads, k);
    double mean = 0, var = 0;
    for (double v : r.fluctuations) mean += v;
    mean /= static_cast<double>(r.fluctuations.size());
    for (double v : r.fluctuations) var += (v - mean) * (v - mean);
    if (r.fluctuations.size() > 1) var /= static_cast<double>(r.fluctuations.size() - 1);
    Json j;
    j["meta"] = meta.ToJson();
    j["horizon"] = r.horizon;
    j["samples"] = r.sample_count;
    j["mean_rate"] = r.mean_rate;
    j["log2"] = std::log(2.0);
    j["sigma2_series"] = r.sigma2_series;
    j["sigma2_tolerance"] = r.sigma2_tolerance;
    j["sigma2"] = r.sigma2;
    if (r.ks) {
      j["ks"] = *r.ks;
    } else {
      j["ks"] = nullptr;
      j["ks_skipped"] = "ZeroVariance: sigma^2 = 0";
    }
    j["fluctuation_mean"] = mean;
    j["fluctuation_var"] = var;
    Emit(Dump(j), c.out, out);
  } else {
    throw Error(ErrorKind::kBadInput, "--op must be decay, modulus or lyapunov");
  }
}

}  // namespace

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

IntMatrix ParseMatrix(const std::string& text) {
  std::vector<std::vector<Integer>> rows;
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), '\n', ';');
  std::istringstream in(normalized);
  std::string row;
  while (std::getline(in, row, ';')) {
    row = Trim(row);
    if (row.empty() || row[0] == '#') continue;
    rows.push_back(ParseVector(row));
  }
  if (rows.empty()) throw Error(ErrorKind::kBadInput, "empty matrix");
  const std::size_t d = rows.size();
  std::vector<Integer> entries;
  for (const auto& r : rows) {
    if (r.size() != d) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "matrix \"" + text + "\" is not square");
    }
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return IntMatrix(d, std::move(entries));
}

IntVector ParseVector(const std::string& text) {
  IntVector v;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    cell = Trim(cell);
    const bool ok = !cell.empty() &&
                    std::all_of(cell.begin() + (cell[0] == '-' || cell[0] == '+'),
                                cell.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }) &&
                    cell.size() > static_cast<std::size_t>(cell[0] == '-' || cell[0] == '+');
    if (!ok) throw Error(ErrorKind::kBadInput, "not an integer: \"" + cell + "\"");
    v.push_back(Integer(cell[0] == '+' ? cell.substr(1) : cell));
  }
  if (v.empty()) throw Error(ErrorKind::kBadInput, "empty integer list");
  return v;
}

std::string RunMeta::HashHex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash));
  return buf;
}

std::string RunMeta::HeaderBlock() const {
  std::string s = "# toral-decay " TORAL_DECAY_VERSION "\n";
  s += "# subcommand " + subcommand + "\n";
  s += "# config_hash " + HashHex() + "\n";
  s += "# seed " + (seed ? std::to_string(*seed) : std::string("none")) + "\n";
  return s;
}

Json RunMeta::ToJson() const {
  Json j;
  j["version"] = TORAL_DECAY_VERSION;
  j["subcommand"] = subcommand;
  j["config_hash"] = HashHex();
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  return j;
}

void EmitPlotData(const DecayReport& report, const std::string& path,
                  const RunMeta& meta) {
  if (report.rows.empty()) {
    throw Error(ErrorKind::kBadInput, "empty report, nothing written to " + path);
  }
  std::vector<std::pair<double, double>> xy;
  std::string csv = CsvHeader(meta, {"log_n", "log_value"});
  for (const auto& row : report.rows) {
    if (row.n == 0 || !(row.value > 0)) continue;
    xy.emplace_back(row.n, row.value);
    csv += CsvRow({Num(std::log(static_cast<double>(row.n))), Num(std::log(row.value))});
  }
  Json side;
  side["meta"] = meta.ToJson();
  side["x"] = "log_n";
  side["y"] = "log_value";
  side["points"] = xy.size();
  side["loglog_slope"] = xy.size() >= 2 ? Json(LogLogSlope(xy)) : Json(nullptr);
  side["fit"] = report.fit ? RateFitJson(*report.fit) : Json(nullptr);
  WriteFile(path, csv);
  WriteFile(path + ".json", Dump(side));
}

void EmitPlotData(const ModulusCurve& curve, const std::string& path,
                  const RunMeta& meta) {
  if (curve.radii.empty()) {
    throw Error(ErrorKind::kBadInput, "empty curve, nothing written to " + path);
  }
  std::vector<std::pair<double, double>> xy;
  std::string csv = CsvHeader(meta, {"delta", "omega"});
  for (std::size_t i = 0; i < curve.radii.size(); ++i) {
    csv += CsvRow({Num(curve.radii[i]), Num(curve.values[i])});
    if (curve.values[i] > 0) xy.emplace_back(curve.radii[i], curve.values[i]);
  }
  Json side;
  side["meta"] = meta.ToJson();
  side["x"] = "delta";
  side["y"] = "omega";
  side["points"] = curve.radii.size();
  side["loglog_slope"] = xy.size() >= 2 ? Json(LogLogSlope(xy)) : Json(nullptr);
  WriteFile(path, csv);
  WriteFile(path + ".json", Dump(side));
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Correlation decay experiments for expanding toral endomorphisms",
               "toral-decay"};
  app.set_help_flag("--help", "print this help and exit");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool matrix, bool seeded) {
    if (matrix) {
      sub->add_option("--matrix", common.matrix,
                      "row-major integer matrix \"a,b;c,d\" or a file holding one")
          ->required();
    }
    if (seeded) sub->add_option("--seed", common.seed, "64-bit seed");
    sub->add_option("--threads", common.threads,
                    "worker threads (default: $TORAL_DECAY_THREADS or all cores)");
    sub->add_option("--out", common.out, "output file (default stdout)");
  };

  auto* info = app.add_subcommand("matrix-info", "q, lambda and a digit set as JSON");
  add_common(info, true, false);
  auto* digits = app.add_subcommand("digits", "digit set as JSON");
  add_common(digits, true, false);

  TileArgs tile_args;
  auto* tile = app.add_subcommand("tile", "tile point cloud and coverage statistics");
  add_common(tile, true, true);
  tile->add_option("--level", tile_args.level, "subdivision level");
  tile->add_option("--samples", tile_args.samples, "coverage samples");
  tile->add_option("--points", tile_args.points, "CSV file for the point cloud");

  TransferArgs transfer_args;
  auto* transfer = app.add_subcommand("transfer", "iterate the transfer operator");
  add_common(transfer, true, false);
  transfer->add_option("--function", transfer_args.function, "polynomial JSON")->required();
  transfer->add_option("--steps", transfer_args.steps, "number of steps");
  transfer->add_option("--emit", transfer_args.emit, "coeffs, norms or modulus")
      ->check(CLI::IsMember({"coeffs", "norms", "modulus"}));
  transfer->add_option("--norm", transfer_args.norm, "l2 or sup (modulus)")
      ->check(CLI::IsMember({"l2", "sup"}));

  DecayArgs decay_args;
  auto* decay = app.add_subcommand("decay", "correlation or transfer-norm decay table");
  add_common(decay, true, true);
  decay->add_option("--f", decay_args.f, "polynomial JSON for f")->required();
  decay->add_option("--g", decay_args.g, "polynomial JSON for g (default f)");
  decay->add_option("--nmax", decay_args.nmax, "last n");
  decay->add_option("--mode", decay_args.mode, "correlation or transfer")
      ->check(CLI::IsMember({"correlation", "transfer"}));
  decay->add_option("--norm", decay_args.norm, "l2 or sup")
      ->check(CLI::IsMember({"l2", "sup"}));
  decay->add_option("--mc-samples", decay_args.mc_samples,
                    "Monte Carlo samples per row (0 = off)");
  decay->add_option("--plot", decay_args.plot, "plot CSV path (+ .json sidecar)");

  LacunaryArgs lac_args;
  auto* lac = app.add_subcommand("lacunary", "lacunary series tails and bounds");
  add_common(lac, true, false);
  lac->add_option("--h", lac_args.h, "base frequency, comma separated");
  lac->add_option("--family", lac_args.family, "power, logpower, geometric or explicit")
      ->check(CLI::IsMember({"power", "logpower", "geometric", "explicit"}));
  lac->add_option("--param", lac_args.param, "alpha, beta or theta");
  lac->add_option("--nmax", lac_args.nmax, "last n");
  lac->add_option("--truncation", lac_args.truncation, "number of terms (0 = infinite)");
  lac->add_option("--design", lac_args.design, "CSV of target rates delta_1..delta_N");
  lac->add_option("--design-norm", lac_args.design_norm, "sup or l2")
      ->check(CLI::IsMember({"sup", "l2"}));
  lac->add_option("--measure-terms", lac_args.measure_terms,
                  "terms used for measured norms (0 = nmax + 24)");
  lac->add_option("--plot", lac_args.plot, "plot CSV path (+ .json sidecar)");

  CltArgs clt_args;
  auto* clt = app.add_subcommand("clt", "Birkhoff sums against the Gaussian limit");
  add_common(clt, true, true);
  clt->add_option("--f", clt_args.f, "polynomial JSON")->required();
  clt->add_option("--horizon", clt_args.horizon, "Birkhoff length n");
  clt->add_option("--samples", clt_args.samples, "number of samples M");
  clt->add_option("--samples-out", clt_args.samples_out, "CSV file for S_n/sqrt(n)");

  UlamArgs ulam_args;
  auto* ulam = app.add_subcommand("ulam", "Ulam-von Neumann map experiments");
  add_common(ulam, false, true);
  ulam->add_option("--op", ulam_args.op, "decay, modulus or lyapunov")
      ->check(CLI::IsMember({"decay", "modulus", "lyapunov"}));
  ulam->add_option("--nmax", ulam_args.nmax, "last n (decay)");
  ulam->add_option("--truncation", ulam_args.truncation,
                   "cosine terms K (0 = default)");
  ulam->add_option("--horizon", ulam_args.horizon, "orbit length (lyapunov)");
  ulam->add_option("--samples", ulam_args.samples, "orbits (lyapunov)");
  ulam->add_option("--deltas", ulam_args.deltas, "radii (modulus)")->delimiter(',');
  ulam->add_option("--plot", ulam_args.plot, "plot CSV path (+ .json sidecar)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n"
        << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    common.threads = ResolveThreads(common.threads);
    RunMeta meta;
    meta.subcommand = sub->get_name();
    meta.config_hash = ConfigHash(*sub);
    if (sub->get_option_no_throw("--seed") != nullptr) meta.seed = common.seed;

    const std::string name = sub->get_name();
    if (name == "matrix-info") MatrixInfo(common, meta, out);
    else if (name == "digits") Digits(common, meta, out);
    else if (name == "tile") Tile(common, tile_args, meta, out);
    else if (name == "transfer") Transfer(common, transfer_args, meta, out);
    else if (name == "decay") Decay(common, decay_args, meta, out);
    else if (name == "lacunary") Lacunary(common, lac_args, meta, out);
    else if (name == "clt") Clt(common, clt_args, meta, out);
    else if (name == "ulam") Ulam(common, ulam_args, meta, out);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace toral::cli
