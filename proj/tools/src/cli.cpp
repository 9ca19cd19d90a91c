#include "sublis_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "sublis/genlis.hpp"
#include "sublis/io.hpp"
#include "sublis/oracle.hpp"

namespace sublis::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << v;
  return os.str();
}

std::vector<json> as_list(const json& j) {
  if (j.is_array()) return std::vector<json>(j.begin(), j.end());
  return {j};
}

void expand(const json& obj, std::vector<RunConfig>& out) {
  static const std::vector<std::string> known = {"name", "family", "n", "k", "lambda", "lambda_plant", "epsilon",
                                                 "beta", "seed", "trials", "exact", "precision_slack", "trim_heavy"};
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown config field: " + it.key());
  if (!obj.contains("seed")) throw ConfigError("config needs an explicit seed");
  if (!obj.contains("n")) throw ConfigError("config needs n");

  // Cartesian product over the sweepable fields, in a fixed field order.
  const std::vector<std::string> sweep = {"family", "n", "k", "lambda", "lambda_plant", "epsilon", "beta"};
  std::vector<std::pair<std::string, std::vector<json>>> axes;
  for (const auto& f : sweep)
    if (obj.contains(f)) axes.push_back({f, as_list(obj.at(f))});
  std::vector<std::size_t> idx(axes.size(), 0);
  const std::string base = obj.value("name", std::string("cfg"));
  for (;;) {
    RunConfig c;
    c.spec.seed = obj.at("seed").get<std::uint64_t>();
    c.trials = obj.value("trials", std::size_t{1});
    c.exact = obj.value("exact", true);
    c.params.precision_slack = obj.value("precision_slack", 1.0);
    c.params.trim_heavy = obj.value("trim_heavy", false);
    bool plant_set = false;
    std::string label = base;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& [field, vals] = axes[a];
      const json& v = vals[idx[a]];
      if (field == "family") c.spec.family = parse_family(v.get<std::string>());
      if (field == "n") c.spec.n = v.get<std::size_t>();
      if (field == "k") c.spec.k = v.get<std::size_t>();
      if (field == "lambda") c.lambda = v.get<double>();
      if (field == "lambda_plant") c.spec.lambda_plant = v.get<double>(), plant_set = true;
      if (field == "epsilon") c.epsilon = v.get<double>();
      if (field == "beta") c.beta = v.get<unsigned>();
      if (vals.size() > 1) label += "/" + field + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    }
    if (!plant_set) c.spec.lambda_plant = c.lambda;
    c.name = label;
    out.push_back(c);
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) return;
    }
    if (axes.empty()) return;
  }
}

Row run_one(const RunConfig& c, std::uint64_t seed) {
  InstanceSpec spec = c.spec;
  spec.seed = seed;
  const BlockSequence y = generate(spec);
  EstimateOptions o;
  o.seed = seed;
  o.beta = c.beta;
  o.exact = c.exact;
  o.params = c.params;
  Row r;
  r.config = c.name;
  r.family = family_name(spec.family);
  r.n = spec.n;
  r.k = y.width();
  r.seed = seed;
  r.report = estimate_lis_main(y, c.lambda, c.epsilon, o);
  return r;
}

double percentile95(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const auto i = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size()))) - 1;
  return v[std::min(i, v.size() - 1)];
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Sink {
  std::ofstream file;
  std::ostream* os;
  explicit Sink(const std::string& path, std::ostream& fallback) : os(&fallback) {
    if (!path.empty() && path != "-") {
      file.open(path);
      if (!file) throw std::runtime_error("cannot write " + path);
      os = &file;
    }
  }
};

}  // namespace

std::vector<RunConfig> parse_bench_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("config: ") + e.what());
  }
  std::vector<RunConfig> out;
  try {
    for (const auto& o : as_list(j)) {
      if (!o.is_object()) throw ConfigError("config entries must be objects");
      expand(o, out);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return out;
}

std::string csv_header() {
  return "config,family,n,k,seed,estimate,exact,reads,tests,runtime_ms,params,within_bound";
}

std::string csv_row(const Row& r, bool timing) {
  const auto& rep = r.report;
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << r.config << ',' << r.family << ',' << r.n << ',' << r.k << ',' << r.seed << ',' << rep.estimate << ',';
  if (rep.exact) os << *rep.exact;
  os << ',' << rep.positions_read << ',' << rep.genuineness_tests << ',';
  if (timing) os << fmt(std::round(rep.runtime_ms * 1000.0) / 1000.0);
  os << ',' << rep.params_trace() << ',' << (rep.within_bound() ? 1 : 0);
  return os.str();
}

std::vector<Row> run_bench(const std::vector<RunConfig>& configs, unsigned jobs) {
  struct Task {
    std::size_t config;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < configs.size(); ++c)
    for (std::size_t t = 0; t < configs[c].trials; ++t) tasks.push_back({c, configs[c].spec.seed + t});

  std::vector<std::pair<std::size_t, Row>> done;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        Row r = run_one(configs[tasks[i].config], tasks[i].seed);
        std::lock_guard lock(mu);
        done.push_back({tasks[i].config, std::move(r)});
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::sort(done.begin(), done.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, a.second.seed) < std::tie(b.first, b.second.seed);
  });
  std::vector<Row> rows;
  for (auto& [c, r] : done) rows.push_back(std::move(r));
  return rows;
}

std::string bench_summary(const std::vector<Row>& rows) {
  std::map<std::string, std::vector<const Row*>> by;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!by.count(r.config)) order.push_back(r.config);
    by[r.config].push_back(&r);
  }
  std::ostringstream os;
  os.imbue(std::locale::classic());
  std::size_t total_violations = 0;
  for (const auto& name : order) {
    const auto& rs = by[name];
    double est = 0;
    std::vector<double> reads, tests;
    std::size_t viol = 0;
    for (const Row* r : rs) {
      est += static_cast<double>(r->report.estimate);
      reads.push_back(static_cast<double>(r->report.positions_read));
      tests.push_back(static_cast<double>(r->report.genuineness_tests));
      viol += !r->report.within_bound();
    }
    const double m = static_cast<double>(rs.size());
    double mr = 0, mt = 0;
    for (double v : reads) mr += v;
    for (double v : tests) mt += v;
    total_violations += viol;
    os << "# config=" << name << " runs=" << rs.size() << " mean_estimate=" << fmt(est / m)
       << " mean_reads=" << fmt(mr / m) << " p95_reads=" << fmt(percentile95(reads)) << " mean_tests=" << fmt(mt / m)
       << " p95_tests=" << fmt(percentile95(tests)) << " violations=" << viol << '\n';
  }
  os << "# total_runs=" << rows.size() << " total_violations=" << total_violations << '\n';
  return os.str();
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sublinear LIS estimation"};
  app.require_subcommand(1);

  std::string family = "random_permutation", out_path, in_path, config_path;
  std::size_t n = 0, k = 1, trials = 1;
  double lambda = 0.125, epsilon = 0.25, slack = 1.0;
  unsigned beta = 0, jobs = 1;
  std::uint64_t seed = 1;
  bool exact = false, no_timing = false, header = false, flagged = false;

  auto* gen = app.add_subcommand("generate", "write an instance file");
  gen->add_option("--family", family)->check(CLI::IsMember(
      {"random_permutation", "planted_chain", "concentrated_opt", "uniform_opt", "block_random"}));
  gen->add_option("--n", n)->required();
  gen->add_option("--k", k);
  gen->add_option("--lambda", lambda, "planted chain fraction");
  gen->add_option("--seed", seed)->required();
  gen->add_option("--out", out_path);

  auto* est = app.add_subcommand("estimate", "estimate the LIS of an instance file");
  est->add_option("input", in_path)->required();
  est->add_option("--lambda", lambda);
  est->add_option("--epsilon", epsilon);
  est->add_option("--beta", beta);
  est->add_option("--seed", seed);
  est->add_option("--precision-slack", slack);
  est->add_flag("--exact", exact);
  est->add_flag("--no-timing", no_timing);
  est->add_flag("--header", header);
  est->add_option("--out", out_path);

  auto* bench = app.add_subcommand("bench", "run a JSON experiment config");
  bench->add_option("config", config_path)->required();
  bench->add_option("--jobs", jobs);
  bench->add_option("--out", out_path);
  bench->add_flag("--no-timing", no_timing);

  auto* ver = app.add_subcommand("verify", "check estimator invariants on an instance file");
  ver->add_option("input", in_path)->required();
  ver->add_option("--lambda", lambda);
  ver->add_option("--epsilon", epsilon);
  ver->add_option("--beta", beta);
  ver->add_option("--seed", seed);
  ver->add_option("--trials", trials);
  ver->add_flag("--flagged", flagged, "input carries a flag column; checks the GenLIS estimator");
  ver->add_flag("--no-timing", no_timing);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      InstanceSpec spec{parse_family(family), n, k, lambda, seed};
      const BlockSequence y = generate(spec);
      Sink sink(out_path, out);
      write_sequence(*sink.os, y);
      return kOk;
    }
    if (*est) {
      const BlockSequence y = read_sequence_file(in_path);
      EstimateOptions o;
      o.seed = seed;
      o.beta = beta;
      o.exact = exact;
      o.params.precision_slack = slack;
      Row r;
      r.config = "estimate";
      r.family = "file";
      r.n = y.blocks();
      r.k = y.width();
      r.seed = seed;
      r.report = estimate_lis_main(y, lambda, epsilon, o);
      Sink sink(out_path, out);
      if (header) *sink.os << csv_header() << '\n';
      *sink.os << csv_row(r, !no_timing) << '\n';
      return kOk;
    }
    if (*bench) {
      const auto configs = parse_bench_config(read_text(config_path));
      const auto rows = run_bench(configs, jobs);
      Sink sink(out_path, out);
      *sink.os << csv_header() << '\n';
      for (const auto& r : rows) *sink.os << csv_row(r, !no_timing) << '\n';
      if (!rows.empty()) *sink.os << bench_summary(rows);
      return kOk;
    }
    if (*ver) {
      std::ifstream in(in_path);
      if (!in) throw std::runtime_error("cannot open " + in_path);
      std::size_t violations = 0;
      if (flagged) {
        const FlaggedSequence f = read_flagged(in);
        for (std::size_t t = 0; t < trials; ++t) {
          QueryLedger ledger;
          GenLisInstance g = make_genlis_instance(f.values, f.flags, &ledger);
          const std::size_t truth = genlis_exact(g);
          const std::size_t zeta = zeta_for(std::max<std::size_t>(g.n, 2));
          const double delta = std::min(1.0, lambda / (10.0 * static_cast<double>(zeta)));
          const unsigned b = beta ? beta : 16;
          const auto tree = PrecisionTree::build_shape(g.n, delta, b, derive_key(seed + t, {0x666c6167}));
          EstimatorParams p;
          p.beta = b;
          p.epsilon = epsilon;
          Engine engine(p, ledger, derive_key(seed + t, {0x656e67}));
          const Schedule s = parameter_schedule(tree.leaves(), epsilon, 0, {b, p.h_constant, g.n});
          const auto r = est_genlis(engine, g, lambda, s.gamma(static_cast<double>(g.k) / lambda), s.tau,
                                    tree.view());
          const bool ok_bound = r.estimate <= truth;
          const bool ok_budget = r.tests <= r.budget && ledger.genuineness_tests() == r.tests;
          violations += !ok_bound + !ok_budget;
          out << "seed=" << seed + t << " estimate=" << r.estimate << " exact=" << truth << " tests=" << r.tests
              << " budget=" << r.budget << (ok_bound && ok_budget ? " ok" : " VIOLATION") << '\n';
        }
      } else {
        const BlockSequence y = read_sequence(in);
        for (std::size_t t = 0; t < trials; ++t) {
          EstimateOptions o;
          o.seed = seed + t;
          o.beta = beta;
          o.exact = true;
          Row r;
          r.config = "verify";
          r.family = "file";
          r.n = y.blocks();
          r.k = y.width();
          r.seed = o.seed;
          r.report = estimate_lis_main(y, lambda, epsilon, o);
          const bool oracle_ok = y.width() != 1 || lis_exact(y.flat_values()) == *r.report.exact;
          const bool reads_ok = r.report.positions_read <= y.blocks() * y.width();
          const bool ok = r.report.within_bound() && oracle_ok && reads_ok;
          violations += !ok;
          out << csv_row(r, !no_timing) << (ok ? "" : ",VIOLATION") << '\n';
        }
      }
      out << "# violations=" << violations << '\n';
      return violations ? kViolation : kOk;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace sublis::cli
