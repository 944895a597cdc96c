// flatlab command-line front end.
//
// Exit codes: 0 success, 1 validation error, 2 usage error.
// FLATLAB_OUTPUT_DIR prefixes relative --out paths; FLATLAB_WORKERS sets the
// default worker count.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "flatlab/experiment.hpp"
#include "flatlab/io.hpp"
#include "flatlab/saddle_scan.hpp"
#include "flatlab/sampling.hpp"
#include "flatlab/stats.hpp"
#include "flatlab/surgery.hpp"

using namespace flatlab;

namespace {

struct Options {
  std::string stratum;
  int genus = 0;
  int squares = 0;
  std::uint64_t seed = 0;
  int samples = 100;
  std::string intervals = "0:0.5";
  double length = 0.0;
  std::string in;
  std::string out;
  std::string format;  // per-command default when empty
  int workers = 0;
  std::string method = "mcmc";
  long long mcmc_steps = SamplerConfig{}.mcmc_steps;
  long long burn_in = SamplerConfig{}.burn_in;
  int samples_per_chain = SamplerConfig{}.samples_per_chain;
  double radius = SamplerConfig{}.radius;
  int r_max = 4;
  int uniform_order = 0;
  std::vector<double> eps{0.05, 0.1, 0.2, 0.5};
  // surgery
  std::string action;
  int index = -1;
  std::string side = "start";
  int zero = -1;
  std::string holonomy;
  int choice = 0;
  double bound = 1.0;
};

void write_output(const Options& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    return;
  }
  std::filesystem::path p(o.out);
  if (p.is_relative())
    if (const char* dir = std::getenv("FLATLAB_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + p.string());
  f << text;
}

int workers(const Options& o) {
  if (o.workers > 0) return o.workers;
  if (const char* w = std::getenv("FLATLAB_WORKERS"); w && *w) {
    try {
      const int n = std::stoi(w);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::InvalidArgument, "FLATLAB_WORKERS must be a positive integer");
  }
  return 1;
}

StratumSignature stratum_of(const Options& o) {
  if (!o.stratum.empty()) {
    const auto s = parse_stratum(o.stratum);
    if (o.genus > 0 && s.genus() != o.genus) throw Error(ErrorKind::InvalidArgument, "stratum and genus disagree");
    return s;
  }
  if (o.genus >= 2) return StratumSignature{std::vector<int>(2 * o.genus - 2, 1)};
  throw Error(ErrorKind::InvalidArgument, "give --stratum or --genus >= 2");
}

SamplerConfig sampler_config(const Options& o) {
  SamplerConfig c;
  c.stratum = stratum_of(o);
  c.n_squares = o.squares > 0 ? o.squares : default_square_count(c.stratum);
  c.seed = o.seed;
  c.method = parse_sampler_method(o.method);
  c.mcmc_steps = o.mcmc_steps;
  c.burn_in = o.burn_in;
  c.samples_per_chain = o.samples_per_chain;
  c.radius = o.radius;
  validate(c);
  return c;
}

PoissonExperimentConfig experiment_config(const Options& o) {
  PoissonExperimentConfig c;
  c.sampler = sampler_config(o);
  c.samples = o.samples;
  c.intervals = parse_intervals(o.intervals);
  c.r_max = o.r_max;
  if (o.uniform_order > 0) c.mode = LambdaMode::uniform_order(o.uniform_order);
  c.lmin_eps = o.eps;
  c.workers = workers(o);
  return c;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_sample(const Options& o) {
  const auto cfg = sampler_config(o);
  json docs = json::array();
  SamplerManifest manifest;
  if (cfg.method == SamplerMethod::ChartPerturbation) {
    auto s = sample_surfaces(cfg, o.samples, workers(o));
    for (const auto& x : s.surfaces) docs.push_back(to_json(x));
    manifest = std::move(s.manifest);
  } else {
    // the exact square-tiled surfaces, not rescaled copies
    auto s = sample_origamis(cfg, o.samples, workers(o));
    for (const auto& x : s.origamis) docs.push_back({{"origami", to_json(x)}, {"surface", to_json(build_from_origami(x))}});
    manifest = std::move(s.manifest);
  }
  write_output(o, dump({{"config", to_json(cfg)}, {"manifest", to_json(manifest)}, {"surfaces", docs}}));
  return 0;
}

json scan_json(const ScanResult& r) {
  json cs = json::array();
  for (const auto& c : r.connections)
    cs.push_back({{"start", c.start_cone}, {"end", c.end_cone}, {"x", c.holonomy.x}, {"y", c.holonomy.y},
                  {"length", c.length()}});
  return {{"length_bound", r.length_bound}, {"connections", cs}};
}

int cmd_scan(const Options& o) {
  const auto s = load_surface(o.in);
  ScanOptions opt;
  opt.with_anchors = false;
  const auto r = enumerate_saddle_connections(s, o.length, opt);
  if (o.format == "json") {
    json j = scan_json(r);
    j["length"] = o.length;
    j["input"] = o.in;
    write_output(o, dump(j));
  } else {
    std::ostringstream os;
    write_csv(os, r);
    write_output(o, os.str());
  }
  return 0;
}

int cmd_classify(const Options& o) {
  const auto s = load_surface(o.in);
  write_output(o, dump({{"input", o.in}, {"bound", o.bound}, {"class", to_string(classify_generic(s, o.bound))}}));
  return 0;
}

PlanarVector parse_vector(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--holonomy", "expected x,y");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--holonomy", "expected x,y");
  }
}

int cmd_surgery(const Options& o) {
  const auto s = load_surface(o.in);
  if (o.action == "collapse") {
    const auto scan = enumerate_saddle_connections(s, o.length);
    if (o.index < 0 || o.index >= static_cast<int>(scan.connections.size()))
      throw Error(ErrorKind::InvalidArgument, "no connection with that index within the length bound");
    const auto side = o.side == "end" ? CollapseSide::IntoEnd : CollapseSide::IntoStart;
    const auto r = collapse_pair(s, scan.connections[o.index], side);
    write_output(o, dump({{"input", o.in}, {"surface", to_json(r.surface)}, {"record", to_json(r.record)}}));
  } else {
    const auto r = open_up_with_connection(s, o.zero, parse_vector(o.holonomy), o.choice);
    write_output(o, dump({{"input", o.in},
                          {"surface", to_json(r.surface)},
                          {"connection",
                           {{"start", r.connection.start_cone},
                            {"end", r.connection.end_cone},
                            {"x", r.connection.holonomy.x},
                            {"y", r.connection.holonomy.y}}}}));
  }
  return 0;
}

int cmd_experiment(const Options& o, const std::string& kind) {
  const auto cfg = experiment_config(o);
  const auto r = run_poisson_experiment(cfg);
  if (o.format == "csv") {
    write_output(o, raw_counts_csv(r));
  } else if (o.format == "plot-data") {
    write_output(o, plot_data(r));
  } else if (kind == "poisson") {
    write_output(o, dump(to_json(r)));
  } else {
    json full = to_json(r);
    json j{{"config", full["config"]}, {"seed", full["seed"]}, {"manifest", full["manifest"]}, {"raw", full["raw"]}};
    if (kind == "sv")
      j["siegel_veech"] = full["siegel_veech"];
    else
      j["lmin"] = full["lmin"];
    write_output(o, dump(j));
  }
  return 0;
}

void add_sampler_flags(CLI::App* c, Options& o) {
  c->add_option("--stratum", o.stratum, "zero orders, e.g. 1,1,1,1");
  c->add_option("--genus", o.genus, "principal stratum of this genus when --stratum is absent");
  c->add_option("--squares", o.squares, "square count (default 25 g^2)");
  c->add_option("--seed", o.seed, "random seed");
  c->add_option("--samples", o.samples, "number of samples")->check(CLI::PositiveNumber);
  c->add_option("--method", o.method, "mcmc, rejection or chart")->check(CLI::IsMember({"mcmc", "rejection", "chart"}));
  c->add_option("--mcmc-steps", o.mcmc_steps, "proposals between samples")->check(CLI::PositiveNumber);
  c->add_option("--burn-in", o.burn_in, "proposals discarded per chain")->check(CLI::NonNegativeNumber);
  c->add_option("--samples-per-chain", o.samples_per_chain, "samples per independent chain")->check(CLI::PositiveNumber);
  c->add_option("--radius", o.radius, "chart perturbation radius")->check(CLI::NonNegativeNumber);
  c->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
}

void add_output_flags(CLI::App* c, Options& o, std::vector<std::string> formats) {
  c->add_option("--out", o.out, "output path (stdout by default)");
  c->add_option("--format", o.format, "output format")->check(CLI::IsMember(formats));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatlab: saddle connections on random translation surfaces"};
  app.require_subcommand(1);
  Options o;

  auto* sample = app.add_subcommand("sample", "draw random surfaces from a stratum");
  add_sampler_flags(sample, o);
  add_output_flags(sample, o, {"json"});

  auto* scan = app.add_subcommand("scan", "list saddle connections up to a length");
  scan->add_option("--in", o.in, "surface or origami document")->required()->check(CLI::ExistingFile);
  scan->add_option("--length", o.length, "length bound")->required()->check(CLI::NonNegativeNumber);
  add_output_flags(scan, o, {"csv", "json"});

  auto* surgery = app.add_subcommand("surgery", "collapse a connection or open up a zero of order two");
  surgery->add_option("action", o.action, "collapse or open")->required()->check(CLI::IsMember({"collapse", "open"}));
  surgery->add_option("--in", o.in, "surface or origami document")->required()->check(CLI::ExistingFile);
  surgery->add_option("--length", o.length, "scan bound used to index connections (collapse)");
  surgery->add_option("--index", o.index, "connection index in the scan (collapse)");
  surgery->add_option("--side", o.side, "surviving endpoint (collapse)")->check(CLI::IsMember({"start", "end"}));
  surgery->add_option("--zero", o.zero, "zero of order two (open)");
  surgery->add_option("--holonomy", o.holonomy, "new connection vector x,y (open)");
  surgery->add_option("--choice", o.choice, "which of the three directions to cut (open)");
  add_output_flags(surgery, o, {"json"});

  auto* classify = app.add_subcommand("classify", "generic / short loop / short cherry");
  classify->add_option("--in", o.in, "surface or origami document")->required()->check(CLI::ExistingFile);
  classify->add_option("--bound", o.bound, "threshold B")->check(CLI::PositiveNumber);
  add_output_flags(classify, o, {"json"});

  auto* experiment = app.add_subcommand("experiment", "sampled experiments");
  experiment->require_subcommand(1);
  std::string kind;
  for (const char* k : {"poisson", "sv", "lmin"}) {
    auto* e = experiment->add_subcommand(k, std::string(k) + " experiment");
    add_sampler_flags(e, o);
    add_output_flags(e, o, {"json", "csv", "plot-data"});
    e->add_option("--intervals", o.intervals, "windows a:b[,a:b...] in units of 1/g")
        ->check([](const std::string& s) {
          try {
            parse_intervals(s);
          } catch (const Error& e) {
            return std::string(e.what());
          }
          return std::string();
        });
    e->add_option("--r-max", o.r_max, "highest factorial moment")->check(CLI::PositiveNumber);
    e->add_option("--uniform-order", o.uniform_order, "compare against the order-m formula");
    e->add_option("--eps", o.eps, "l_min thresholds in units of 1/g")->delimiter(',');
    e->callback([&kind, k] { kind = k; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sample) return cmd_sample(o);
    if (*scan) return cmd_scan(o);
    if (*surgery) return cmd_surgery(o);
    if (*classify) return cmd_classify(o);
    if (*experiment) return cmd_experiment(o, kind);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
