// cantor-frame: batch command-line interface over the header library.
//
// Subcommands: matrix, spectrum, moments, topeig, selfcheck, sweep.
// Every invocation is deterministic -- identical flags produce byte-identical
// output -- and output files are composed fully in memory before anything is
// written, so errors never leave partial files behind.
//
// Exit codes are part of the interface:
//   0  success (selfcheck: all rows passed)
//   1  selfcheck reported at least one failing row
//   2  usage or validation error
//   3  size cap exceeded (dense oracle or recursion depth limits)
//   4  eigensolver failed to converge
//   5  secular bracket failure (raise --M)

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "cantor_frame/eigen_scalar.hpp"
#include "cantor_frame/frame_operator.hpp"
#include "cantor_frame/haar.hpp"
#include "cantor_frame/matrix.hpp"
#include "cantor_frame/moments.hpp"
#include "cantor_frame/resolvent.hpp"
#include "cantor_frame/selfcheck.hpp"
#include "cantor_frame/selfsim.hpp"
#include "cantor_frame/spectral.hpp"
#include "cantor_frame/word.hpp"

namespace cf = cantor_frame;
using nlohmann::ordered_json;
using Rational = boost::multiprecision::cpp_rational;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSizeCap = 3;
constexpr int kExitSolver = 4;
constexpr int kExitBracket = 5;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SizeCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Branch weight as given on the command line: either "num/den" (kept exact
// for rational-mode moments) or a decimal.
struct PValue {
  double value = 0.5;
  bool is_fraction = true;
  long long num = 1;
  long long den = 2;
  std::string text = "1/2";
};

PValue parse_p(const std::string& text) {
  PValue out;
  out.text = text;
  try {
    size_t slash = text.find('/');
    if (slash != std::string::npos) {
      size_t used = 0;
      out.num = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw UsageError("--p: bad numerator");
      std::string den_text = text.substr(slash + 1);
      out.den = std::stoll(den_text, &used);
      if (used != den_text.size() || out.den <= 0)
        throw UsageError("--p: bad denominator");
      out.is_fraction = true;
      out.value = double(out.num) / double(out.den);
    } else {
      size_t used = 0;
      out.value = std::stod(text, &used);
      if (used != text.size()) throw UsageError("--p: trailing characters");
      out.is_fraction = false;
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("--p: cannot parse '" + text + "'");
  }
  if (!(out.value > 0.0 && out.value < 1.0))
    throw UsageError("--p must lie strictly between 0 and 1");
  if (std::max(out.value, 1.0 - out.value) > 0.95)
    std::fprintf(stderr,
                 "warning: extreme branch weight p=%s; geometric tail bounds "
                 "converge very slowly\n",
                 text.c_str());
  return out;
}

// "start:stop:step" -> ascending grid; every point must lie in (0,1).
std::vector<double> parse_grid(const std::string& text) {
  double start = 0.0, stop = 0.0, step = 0.0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step,
                  &tail) != 3)
    throw UsageError("--grid expects start:stop:step");
  if (!(step > 0.0) || start > stop)
    throw UsageError("--grid requires step > 0 and start <= stop");
  int count = int(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(size_t(count));
  for (int i = 0; i < count; ++i) {
    double p = start + step * i;
    if (!(p > 0.0 && p < 1.0))
      throw UsageError("--grid points must lie strictly between 0 and 1");
    grid.push_back(p);
  }
  return grid;
}

// Compose-then-write: the full payload exists before the file is opened.
void write_out(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot open output file '" + path + "'");
  file.write(content.data(), std::streamsize(content.size()));
  if (!file) throw UsageError("write failed for '" + path + "'");
}

// The fixed output format of each subcommand; --format only confirms it.
void require_format(const std::string& given, const std::string& native,
                    const char* command) {
  if (!given.empty() && given != native)
    throw UsageError(std::string(command) + " produces " + native +
                     " output; --format " + given + " is not available");
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// matrix

std::string matrix_csv_with_labels(const cf::SymMatrix& s) {
  std::string csv = cf::matrix_to_csv(s);
  size_t header_end = csv.find('\n') + 1;
  std::string out = csv.substr(0, header_end);
  cf::HaarFrame frame(s.depth, cf::BranchWeights(s.p));
  for (int i = 0; i < frame.size(); ++i) {
    cf::BasisIndex b = frame.label_of(i);
    out += "# label " + std::to_string(i) + " ";
    out += b.is_root ? "root" : "diff " + b.word.str();
    out += '\n';
  }
  out += "# columns row,col,value (upper triangle, zeros omitted)\n";
  out += csv.substr(header_end);
  return out;
}

int run_matrix(const PValue& p, int m, int big_m, const std::string& which,
               const std::string& output) {
  cf::SymMatrix s;
  if (which == "kinf") {
    if (big_m < 0 || big_m > 30) throw UsageError("--M must be in [0, 30]");
    if (big_m > 10)
      throw SizeCapError("matrix kinf caps at M = 10 (dimension 2^M)");
    s = cf::assemble_kinf_truncated(p.value, big_m);
  } else {
    if (m < 0 || m > 10) throw UsageError("--m must be in [0, 10]");
    if (which == "km-gram") {
      if (m > cf::kMaxGramOracleDepth)
        throw SizeCapError("matrix km-gram caps at m = " +
                           std::to_string(cf::kMaxGramOracleDepth));
      s = cf::assemble_km_gram_oracle(p.value, m);
    } else if (which == "km-filtration") {
      s = cf::assemble_km_filtration(p.value, m);
    } else {
      s = cf::assemble_km_closed(p.value, m);
    }
  }
  write_out(matrix_csv_with_labels(s), output);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// spectrum

int run_spectrum(const PValue& p, int m, const std::string& which,
                 const std::string& output) {
  if (m < 0 || m > 10) throw UsageError("--m must be in [0, 10]");
  cf::SpectralData sd = (which == "kinf")
                            ? cf::spectral_kinf_dense(p.value, m)
                            : cf::spectral_km_dense(p.value, m);
  double trace = 0.0;
  double frob2 = 0.0;
  for (double v : sd.eigenvalues) {
    trace += v;
    frob2 += v * v;
  }
  ordered_json j;
  j["p"] = p.value;
  j["which"] = which;
  j["depth"] = m;
  j["eigenvalues"] = sd.eigenvalues;
  ordered_json clusters = ordered_json::array();
  for (const cf::EigenvalueGroup& g : cf::cluster_eigenvalues(sd.eigenvalues)) {
    ordered_json c;
    c["value"] = g.value;
    c["multiplicity"] = g.multiplicity;
    clusters.push_back(c);
  }
  j["clusters"] = clusters;
  j["rooted_weights"] = sd.rooted_weights;
  j["trace"] = trace;
  j["frobenius_squared"] = frob2;
  j["tail_bound"] = sd.tail_bound;
  write_out(json_text(j), output);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// moments

int run_moments(const PValue& p, int n, const std::string& mode,
                const std::string& output) {
  if (n < 0) throw UsageError("--n must be nonnegative");
  ordered_json j;
  if (mode == "rational") {
    if (!p.is_fraction)
      throw UsageError("--mode rational requires --p as a fraction num/den");
    if (n > cf::kMaxMomentsRational)
      throw SizeCapError("rational moments cap at N = " +
                         std::to_string(cf::kMaxMomentsRational));
    j["p"] = p.text;
    j["mode"] = mode;
    std::vector<Rational> mu =
        cf::moments_recursive<Rational>(Rational(p.num, p.den), n);
    ordered_json list = ordered_json::array();
    for (const Rational& v : mu) list.push_back(v.str());
    j["mu"] = list;
  } else {
    if (n > cf::kMaxMomentsFloat)
      throw SizeCapError("float moments cap at N = " +
                         std::to_string(cf::kMaxMomentsFloat));
    j["p"] = p.value;
    j["mode"] = mode;
    j["mu"] = cf::moments_recursive<double>(p.value, n);
  }
  write_out(json_text(j), output);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// topeig

void validate_truncation(double p, int big_m) {
  bool symmetric = p == 0.5;
  if (big_m < 4) throw UsageError("--M must be at least 4");
  if (big_m > 30) throw UsageError("--M must be at most 30");
  if (!symmetric && big_m > 15)
    throw SizeCapError(
        "truncation caps at M = 15 away from p = 1/2 (the recursion doubles "
        "work per level); M up to 30 needs the closed form at p = 1/2");
}

int run_topeig(const PValue& p, int big_m, const std::string& output) {
  validate_truncation(p.value, big_m);
  cf::SecularSolve s = cf::solve_top_eigenvalue(p.value, big_m);
  cf::Compression2x2 c2 = cf::compression_2x2(p.value);
  ordered_json j;
  j["p"] = p.value;
  j["depth"] = s.depth;
  j["lambda_scalar"] = s.lambda_star;
  j["lambda_direct"] = s.lambda_direct;
  j["tolerance"] = s.combined_tolerance;
  j["agreement"] = s.agreement;
  j["simple"] = s.certified_simple;
  j["gap"] = s.gap;
  j["residual"] = s.residual;
  j["bracket"] = {s.bracket_lo, s.bracket_hi};
  j["lower_bound_2x2"] = c2.lambda_max;
  write_out(json_text(j), output);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// selfcheck

int run_selfcheck_cmd(bool perturb, const std::string& output) {
  cf::SelfcheckReport report = cf::run_selfcheck(perturb);
  write_out(cf::format_selfcheck(report), output);
  return report.all_pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  double p = 0.0;
  double lambda_direct = std::numeric_limits<double>::quiet_NaN();
  double lambda_scalar = std::numeric_limits<double>::quiet_NaN();
  double lower_bound_2x2 = 0.0;
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0;
  double tail_bound = 0.0;
};

SweepRow sweep_row(double p, int big_m) {
  SweepRow row;
  row.p = p;
  try {
    cf::SecularSolve s = cf::solve_top_eigenvalue(p, big_m, 1e-10, 8);
    row.lambda_direct = s.lambda_direct;
    row.lambda_scalar = s.lambda_star;
  } catch (const std::exception&) {
    // Row stays NaN: the sweep reports what it could certify and moves on.
  }
  row.lower_bound_2x2 = cf::compression_2x2(p).lambda_max;
  std::vector<double> mu = cf::moments_closed<double>(p);
  row.mu1 = mu[0];
  row.mu2 = mu[1];
  row.mu3 = mu[2];
  row.tail_bound = cf::compression_error_bound(p, big_m);
  return row;
}

int sweep_thread_budget(size_t rows) {
  unsigned budget = std::thread::hardware_concurrency();
  if (budget == 0) budget = 1;
  if (const char* env = std::getenv("CANTOR_FRAME_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) budget = unsigned(v);
  }
  return int(std::min<size_t>(budget, rows));
}

int run_sweep(const std::vector<double>& grid, int big_m,
              const std::string& output) {
  for (double p : grid) validate_truncation(p, big_m);
  std::vector<SweepRow> rows(grid.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < grid.size();
         i = next.fetch_add(1))
      rows[i] = sweep_row(grid[i], big_m);
  };
  int threads = sweep_thread_budget(grid.size());
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  std::sort(rows.begin(), rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.p < b.p; });

  std::string csv =
      "p,lambda_direct,lambda_scalar,lower_bound_2x2,mu1,mu2,mu3,tail_bound\n";
  for (const SweepRow& r : rows) {
    csv += cf::fmt_double(r.p) + ',' + cf::fmt_double(r.lambda_direct) + ',' +
           cf::fmt_double(r.lambda_scalar) + ',' +
           cf::fmt_double(r.lower_bound_2x2) + ',' + cf::fmt_double(r.mu1) +
           ',' + cf::fmt_double(r.mu2) + ',' + cf::fmt_double(r.mu3) + ',' +
           cf::fmt_double(r.tail_bound) + '\n';
  }
  write_out(csv, output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cantor-frame: cylinder frame operators of Bernoulli branch measures"};
  app.require_subcommand(1);

  std::string p_text = "1/2";
  int m = 6;
  int big_m = 12;
  int n_moments = 3;
  std::string mode = "float";
  std::string which_matrix = "km-closed";
  std::string which_spectrum = "km";
  std::string format;
  std::string output;
  std::string grid_text = "0.3:0.7:0.1";
  bool perturb = false;

  CLI::App* c_matrix =
      app.add_subcommand("matrix", "write one operator matrix as CSV");
  c_matrix->add_option("--p", p_text, "branch weight, num/den or decimal");
  c_matrix->add_option("--m", m, "frame depth for km-* variants");
  c_matrix->add_option("--M", big_m, "truncation depth for kinf");
  c_matrix->add_option("--which", which_matrix, "matrix to assemble")
      ->check(CLI::IsMember(
          {"km-closed", "km-gram", "km-filtration", "kinf"}));
  c_matrix->add_option("--format", format, "output format (csv)");
  c_matrix->add_option("--output", output, "output path (default stdout)");

  CLI::App* c_spectrum =
      app.add_subcommand("spectrum", "dense eigendecomposition as JSON");
  c_spectrum->add_option("--p", p_text, "branch weight, num/den or decimal");
  c_spectrum->add_option("--m", m, "depth (matrix dimension 2^m)");
  c_spectrum->add_option("--which", which_spectrum, "operator family")
      ->check(CLI::IsMember({"km", "kinf"}));
  c_spectrum->add_option("--format", format, "output format (json)");
  c_spectrum->add_option("--output", output, "output path (default stdout)");

  CLI::App* c_moments =
      app.add_subcommand("moments", "rooted moment sequence as JSON");
  c_moments->add_option("--p", p_text, "branch weight, num/den or decimal");
  c_moments->add_option("--n", n_moments, "highest moment order N");
  c_moments->add_option("--mode", mode, "arithmetic mode")
      ->check(CLI::IsMember({"float", "rational"}));
  c_moments->add_option("--format", format, "output format (json)");
  c_moments->add_option("--output", output, "output path (default stdout)");

  CLI::App* c_topeig = app.add_subcommand(
      "topeig", "top eigenvalue by the scalar secular equation, as JSON");
  c_topeig->add_option("--p", p_text, "branch weight, num/den or decimal");
  c_topeig->add_option("--M", big_m, "truncation depth");
  c_topeig->add_option("--format", format, "output format (json)");
  c_topeig->add_option("--output", output, "output path (default stdout)");

  CLI::App* c_selfcheck = app.add_subcommand(
      "selfcheck", "run the named identity table; exit 0 iff all rows pass");
  c_selfcheck->add_flag("--perturb", perturb,
                        "test hook: inject a known defect into the "
                        "filtration assembly");
  c_selfcheck->add_option("--output", output, "output path (default stdout)");

  CLI::App* c_sweep = app.add_subcommand(
      "sweep", "per-p summary rows over a grid, as CSV (sorted by p)");
  c_sweep->add_option("--grid", grid_text, "p grid as start:stop:step");
  c_sweep->add_option("--M", big_m, "truncation depth per row");
  c_sweep->add_option("--format", format, "output format (csv)");
  c_sweep->add_option("--output", output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (c_matrix->parsed()) {
      require_format(format, "csv", "matrix");
      return run_matrix(parse_p(p_text), m, big_m, which_matrix, output);
    }
    if (c_spectrum->parsed()) {
      require_format(format, "json", "spectrum");
      return run_spectrum(parse_p(p_text), m, which_spectrum, output);
    }
    if (c_moments->parsed()) {
      require_format(format, "json", "moments");
      return run_moments(parse_p(p_text), n_moments, mode, output);
    }
    if (c_topeig->parsed()) {
      require_format(format, "json", "topeig");
      return run_topeig(parse_p(p_text), big_m, output);
    }
    if (c_selfcheck->parsed()) {
      return run_selfcheck_cmd(perturb, output);
    }
    if (c_sweep->parsed()) {
      require_format(format, "csv", "sweep");
      return run_sweep(parse_grid(grid_text), big_m, output);
    }
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const SizeCapError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSizeCap;
  } catch (const cf::EighNoConvergence& e) {
    std::fprintf(stderr, "error: eigensolver did not converge: %s\n",
                 e.what());
    return kExitSolver;
  } catch (const cf::BracketFailure& e) {
    std::fprintf(stderr,
                 "error: %s\nadvice: raise --M; the certified window narrows "
                 "as the truncation deepens\n",
                 e.what());
    return kExitBracket;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
