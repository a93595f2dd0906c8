#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <limits>

#include "CLI11.hpp"
#include "json.hpp"
#include "gbs/clique.hpp"
#include "gbs/io.hpp"
#include "gbs/rng.hpp"

namespace gbs {

namespace {

int env_threads() {
  const char* v = std::getenv("GBS_THREADS");
  if (!v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1 || n > 1024) return 1;
  return int(n);
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string double_str(double x) {
  return nlohmann::json(x).dump();
}

// Every run records the effective value of every flag, so two manifests match
// exactly when (and only when) the runs were configured identically.
struct Flags {
  std::vector<std::pair<std::string, std::string>> items;

  void add(const std::string& name, const std::string& value) {
    items.emplace_back(name, value);
  }
  void add(const std::string& name, double value) { add(name, double_str(value)); }
  void add(const std::string& name, int value) { add(name, std::to_string(value)); }
  void add(const std::string& name, std::uint64_t value) {
    add(name, std::to_string(value));
  }
  void add(const std::string& name, bool value) { add(name, bool_str(value)); }
};

struct Run {
  RunManifest manifest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void input(const std::string& path, const std::string& bytes) {
    manifest.inputs.emplace_back(path, fnv1a64_hex(bytes));
  }
  void output(const std::string& path, const std::string& bytes) {
    write_file_atomic(path, bytes);
    manifest.outputs.push_back(path);
  }
  void finish(const std::string& primary_out) {
    manifest.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    write_manifest(primary_out, manifest);
  }
};

Graph load_graph(const std::string& path, Run& run) {
  const std::string text = read_file(path);
  run.input(path, text);
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".csv") return parse_edge_csv(text, path);
  if (ext == ".json") return parse_graph_json(text, path);
  throw validation_error(path + ": unsupported graph extension '" + ext +
                         "' (expected .json or .csv)");
}

GaussianState graph_state(const Graph& g, double n_mean, double loss) {
  GaussianState s = state_from_device(encode(g.adjacency, n_mean));
  if (loss > 0.0) s = apply_loss(s, loss);
  return s;
}

SampleBatch sample_graph(const Graph& g, double n_mean, double loss,
                         bool threshold, int n_samples, std::uint64_t seed,
                         int threads, const PnrOptions& opt) {
  const GaussianState s = graph_state(g, n_mean, loss);
  return threshold ? sample_threshold(s, n_samples, seed, threads)
                   : sample_pnr(s, n_samples, seed, threads, opt);
}

std::string swap_extension(const std::string& path, const std::string& ext) {
  return std::filesystem::path(path).replace_extension(ext).string();
}

// Shared option bundles ------------------------------------------------------

struct SamplerFlags {
  int samples = 0;
  std::uint64_t seed = 0;
  int threads = env_threads();
  PnrOptions pnr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--samples", samples, "Number of samples to draw")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Random seed (default 0)");
    cmd->add_option("--threads", threads,
                    "Worker threads (default: GBS_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cutoff", pnr.cutoff,
                    "Per-mode photon cutoff explored by default")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-cutoff", pnr.max_cutoff,
                    "Cutoff ceiling when the conditional tail is heavy")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tail-tol", pnr.tail_tol,
                    "Conditional tail mass that triggers widening");
  }
  void record(Flags& f) const {
    f.add("samples", samples);
    f.add("seed", seed);
    f.add("threads", threads);
    f.add("cutoff", pnr.cutoff);
    f.add("max-cutoff", pnr.max_cutoff);
    f.add("tail-tol", pnr.tail_tol);
  }
};

// Subcommands ----------------------------------------------------------------

struct SampleCmd {
  std::string graph;
  double n_mean = 0;
  bool threshold = false;
  double loss = 0;
  SamplerFlags s;
  std::string out;

  void run() const {
    Run run;
    run.manifest.subcommand = "sample";
    const Graph g = load_graph(graph, run);
    const SampleBatch batch = sample_graph(g, n_mean, loss, threshold, s.samples,
                                           s.seed, s.threads, s.pnr);
    run.output(out, samples_jsonl(batch));
    Flags f;
    f.add("graph", graph);
    f.add("n-mean", n_mean);
    f.add("threshold", threshold);
    f.add("loss", loss);
    f.add("out", out);
    s.record(f);
    run.manifest.flags = f.items;
    run.finish(out);
  }
};

struct SubgraphCmd {
  std::string graph;
  double n_mean = 0;
  bool pnr_detector = false;
  double loss = 0;
  int min_size = 0;
  int max_size = 0;
  int max_results = 5;
  SamplerFlags s;
  std::string out;
  std::string svg;

  void run() const {
    Run run;
    run.manifest.subcommand = "subgraph";
    const Graph g = load_graph(graph, run);
    SampleBatch batch = sample_graph(g, n_mean, loss, !pnr_detector, s.samples,
                                     s.seed, s.threads, s.pnr);
    batch = postselect(batch, min_size, max_size);
    const auto subgraphs = to_subgraphs(batch);
    const DenseSubgraphResult result =
        search(subgraphs, g, min_size, max_size, max_results,
               RngStream::derive(s.seed, 1).next_u64(), s.threads);
    run.output(out, subgraph_json(result));
    if (!svg.empty()) {
      // Highlight the densest subgraph found, preferring larger ones on ties.
      std::vector<int> best;
      double best_density = -1.0;
      for (const auto& [size, entries] : result.by_size)
        if (!entries.empty() && entries[0].first >= best_density) {
          best_density = entries[0].first;
          best = entries[0].second;
        }
      run.output(svg, svg_graph(g, best));
    }
    Flags f;
    f.add("graph", graph);
    f.add("n-mean", n_mean);
    f.add("pnr", pnr_detector);
    f.add("loss", loss);
    f.add("min-size", min_size);
    f.add("max-size", max_size);
    f.add("max-results", max_results);
    f.add("out", out);
    f.add("svg", svg);
    s.record(f);
    run.manifest.flags = f.items;
    run.finish(out);
  }
};

struct CliqueCmd {
  std::string graph;
  double n_mean = 0;
  bool pnr_detector = false;
  double loss = 0;
  int iters = 50;
  std::string select = "uniform";
  int max_results = 10;
  SamplerFlags s;
  std::string out;
  std::string svg;

  void run() const {
    Run run;
    run.manifest.subcommand = "clique";
    const Graph g = load_graph(graph, run);
    const SampleBatch batch = sample_graph(g, n_mean, loss, !pnr_detector,
                                           s.samples, s.seed, s.threads, s.pnr);
    const NodeSelect node_select =
        select == "degree" ? NodeSelect::degree : NodeSelect::uniform;
    const auto subgraphs = to_subgraphs(batch);
    std::set<std::vector<int>> found;
    for (std::size_t i = 0; i < subgraphs.size(); ++i) {
      if (subgraphs[i].empty()) continue;
      std::vector<int> c =
          shrink(subgraphs[i], g, RngStream::derive(s.seed, 1, i).next_u64());
      c = local_search(c, g, iters, node_select,
                      RngStream::derive(s.seed, 2, i).next_u64());
      std::sort(c.begin(), c.end());
      found.insert(std::move(c));
    }
    std::vector<std::vector<int>> cliques(found.begin(), found.end());
    std::sort(cliques.begin(), cliques.end(), [](const auto& a, const auto& b) {
      if (a.size() != b.size()) return a.size() > b.size();
      return a < b;
    });
    if (int(cliques.size()) > max_results) cliques.resize(std::size_t(max_results));
    run.output(out, clique_json(cliques));
    if (!svg.empty())
      run.output(svg, svg_graph(g, cliques.empty() ? std::vector<int>{}
                                                   : cliques.front()));
    Flags f;
    f.add("graph", graph);
    f.add("n-mean", n_mean);
    f.add("pnr", pnr_detector);
    f.add("loss", loss);
    f.add("iters", iters);
    f.add("select", select);
    f.add("max-results", max_results);
    f.add("out", out);
    f.add("svg", svg);
    s.record(f);
    run.manifest.flags = f.items;
    run.finish(out);
  }
};

struct SimilarityCmd {
  std::vector<std::string> graphs;
  double n_mean = 0;
  std::vector<int> ks = {2, 4, 6};
  int n_max = 2;
  std::string method = "exact";
  int n_mc = 100000;
  SamplerFlags s;
  std::string out;

  void run() const {
    Run run;
    run.manifest.subcommand = "similarity";
    std::vector<std::string> ids;
    std::vector<FeatureVector> features;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      const Graph g = load_graph(graphs[gi], run);
      FeatureVector fv;
      if (method == "exact") {
        for (const int k : ks) {
          const Event e(k, n_max, g.nodes());
          fv.events.push_back(e);
          fv.values.push_back(event_probability_exact(g.adjacency, n_mean, e));
        }
      } else if (method == "mc") {
        fv = feature_vector_mc(g.adjacency, n_mean, ks, n_max, n_mc,
                               RngStream::derive(s.seed, 3, gi).next_u64(), s.threads);
      } else {
        const SampleBatch batch = sample_graph(
            g, n_mean, 0.0, false, s.samples > 0 ? s.samples : 10000,
            RngStream::derive(s.seed, 4, gi).next_u64(), s.threads, s.pnr);
        fv = feature_vector_sampling(batch, ks, n_max);
      }
      ids.push_back(std::filesystem::path(graphs[gi]).stem().string());
      features.push_back(std::move(fv));
    }
    // Stems are friendlier ids, but fall back to full paths on a collision.
    std::set<std::string> unique_ids(ids.begin(), ids.end());
    if (unique_ids.size() != ids.size()) ids = graphs;
    run.output(out, feature_csv(ids, features));
    Flags f;
    std::string joined;
    for (const std::string& p : graphs) {
      if (!joined.empty()) joined += ";";
      joined += p;
    }
    std::string ks_str;
    for (const int k : ks) {
      if (!ks_str.empty()) ks_str += ",";
      ks_str += std::to_string(k);
    }
    f.add("graphs", joined);
    f.add("n-mean", n_mean);
    f.add("k", ks_str);
    f.add("n-max", n_max);
    f.add("method", method);
    f.add("n-mc", n_mc);
    f.add("out", out);
    s.record(f);
    run.manifest.flags = f.items;
    run.finish(out);
  }
};

struct PointsCmd {
  std::string coords;
  double sigma = 1.0;
  double n_mean = 0;
  std::string process = "permanental";
  int n_points = 0;
  int max_tries = 1000;
  SamplerFlags s;
  std::string out;
  std::string svg;

  void run() const {
    Run run;
    run.manifest.subcommand = "points";
    const std::string text = read_file(coords);
    run.input(coords, text);
    const StateSpace space = parse_points_csv(text, coords);
    const KernelMatrix kernel = rbf_kernel(space, sigma);
    SampleBatch batch;
    if (process == "permanental") {
      batch = n_points > 0
                  ? permanental_sample_conditioned(kernel, n_mean, n_points,
                                                   s.samples, s.seed, max_tries,
                                                   s.threads)
                  : permanental_sample(kernel, n_mean, s.samples, s.seed,
                                       s.threads);
    } else {
      if (n_points > 0)
        throw validation_error(
            "--n-points conditioning is only available for --process permanental");
      batch = hafnian_sample(kernel, n_mean, s.samples, s.seed, s.threads, s.pnr);
    }
    run.output(out, samples_jsonl(batch));
    if (!svg.empty())
      run.output(svg, svg_points(space, batch.samples.empty()
                                            ? std::vector<int>{}
                                            : batch.samples.front().counts));
    Flags f;
    f.add("coords", coords);
    f.add("sigma", sigma);
    f.add("n-mean", n_mean);
    f.add("process", process);
    f.add("n-points", n_points);
    f.add("max-tries", max_tries);
    f.add("out", out);
    f.add("svg", svg);
    s.record(f);
    run.manifest.flags = f.items;
    run.finish(out);
  }
};

struct VibronicCmd {
  std::string input;
  double bin_width = 100.0;
  double gamma = 25.0;
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  SamplerFlags s;
  std::string out;
  std::string svg;

  void run() const {
    Run run;
    run.manifest.subcommand = "vibronic";
    const std::string text = read_file(input);
    run.input(input, text);
    const VibronicInput in = parse_vibronic_json(text, input);
    const VibronicParams params = gbs_params(in);
    const SampleBatch batch =
        sample_vibronic(params, s.samples, s.seed, s.threads, s.pnr);
    const std::vector<double> e = energies(batch, in.w, in.wp);
    // Window defaults to whole multiples of the bin width covering the data
    // plus a 4-gamma margin for the broadened tails.
    const auto [e_min, e_max] = std::minmax_element(e.begin(), e.end());
    const double w_lo = std::isnan(lo)
                            ? std::floor((*e_min - 4.0 * gamma) / bin_width) * bin_width
                            : lo;
    const double w_hi = std::isnan(hi)
                            ? std::ceil((*e_max + 4.0 * gamma) / bin_width) * bin_width
                            : hi;
    const Spectrum spec = spectrum(e, bin_width, gamma, w_lo, w_hi);
    run.output(out, spectrum_csv(spec));
    const std::string svg_path = svg.empty() ? swap_extension(out, ".svg") : svg;
    run.output(svg_path, svg_spectrum(spec));
    Flags f;
    f.add("input", input);
    f.add("bin-width", bin_width);
    f.add("gamma", gamma);
    f.add("lo", w_lo);
    f.add("hi", w_hi);
    f.add("out", out);
    f.add("svg", svg_path);
    s.record(f);
    run.manifest.flags = f.items;
    run.finish(out);
  }
};

struct GenCmd {
  std::string kind;
  std::uint64_t seed = 0;
  int nodes = 30;
  double p = 0.5;
  std::string out;

  void run() const {
    Run run;
    run.manifest.subcommand = "gen " + kind;
    const Graph g = kind == "planted" ? generate_planted(seed)
                                      : erdos_renyi(nodes, p, seed);
    run.output(out, graph_json(g));
    Flags f;
    f.add("seed", seed);
    f.add("out", out);
    if (kind == "er") {
      f.add("nodes", nodes);
      f.add("p", p);
    }
    run.manifest.flags = f.items;
    run.finish(out);
  }
};

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Gaussian boson sampling simulator and application pipelines"};
  app.require_subcommand(1);

  auto sample = std::make_shared<SampleCmd>();
  {
    CLI::App* cmd = app.add_subcommand(
        "sample", "Draw photon-number or threshold samples from a graph device");
    cmd->add_option("--graph", sample->graph,
                    "Input graph (.json adjacency or .csv edge list)")
        ->required();
    cmd->add_option("--n-mean", sample->n_mean, "Target mean photon number")
        ->required();
    cmd->add_flag("--threshold", sample->threshold,
                  "Use threshold (click) detectors instead of photon counting");
    cmd->add_option("--loss", sample->loss,
                    "Uniform photon survival loss in [0, 1)");
    cmd->add_option("--out", sample->out, "Output samples file (JSON lines)")
        ->required();
    sample->s.attach(cmd);
    cmd->callback([sample] { sample->run(); });
  }

  auto subgraph = std::make_shared<SubgraphCmd>();
  {
    CLI::App* cmd = app.add_subcommand(
        "subgraph", "Sample subgraphs and search for dense ones by size");
    cmd->add_option("--graph", subgraph->graph,
                    "Input graph (.json adjacency or .csv edge list)")
        ->required();
    cmd->add_option("--n-mean", subgraph->n_mean, "Target mean photon number")
        ->required();
    cmd->add_flag("--pnr", subgraph->pnr_detector,
                  "Use photon counting instead of threshold detectors");
    cmd->add_option("--loss", subgraph->loss,
                    "Uniform photon survival loss in [0, 1)");
    cmd->add_option("--min-size", subgraph->min_size, "Smallest subgraph size kept")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-size", subgraph->max_size, "Largest subgraph size kept")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-results", subgraph->max_results,
                    "Best subgraphs kept per size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", subgraph->out, "Output results file (JSON)")
        ->required();
    cmd->add_option("--svg", subgraph->svg,
                    "Also draw the graph with the best subgraph highlighted");
    subgraph->s.attach(cmd);
    cmd->callback([subgraph] { subgraph->run(); });
  }

  auto clique = std::make_shared<CliqueCmd>();
  {
    CLI::App* cmd = app.add_subcommand(
        "clique", "Search for large cliques from shrunken samples");
    cmd->add_option("--graph", clique->graph,
                    "Input graph (.json adjacency or .csv edge list)")
        ->required();
    cmd->add_option("--n-mean", clique->n_mean, "Target mean photon number")
        ->required();
    cmd->add_flag("--pnr", clique->pnr_detector,
                  "Use photon counting instead of threshold detectors");
    cmd->add_option("--loss", clique->loss,
                    "Uniform photon survival loss in [0, 1)");
    cmd->add_option("--iters", clique->iters, "Local search swap rounds")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--select", clique->select,
                    "Node selection rule during search")
        ->check(CLI::IsMember({"uniform", "degree"}));
    cmd->add_option("--max-results", clique->max_results, "Cliques reported")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", clique->out, "Output results file (JSON)")->required();
    cmd->add_option("--svg", clique->svg,
                    "Also draw the graph with the best clique highlighted");
    clique->s.attach(cmd);
    cmd->callback([clique] { clique->run(); });
  }

  auto similarity = std::make_shared<SimilarityCmd>();
  {
    CLI::App* cmd = app.add_subcommand(
        "similarity", "Build event-probability feature vectors for graphs");
    cmd->add_option("--graphs", similarity->graphs,
                    "Input graphs (two or more files)")
        ->required()
        ->expected(-2);
    cmd->add_option("--n-mean", similarity->n_mean, "Target mean photon number")
        ->required();
    cmd->add_option("--k", similarity->ks,
                    "Event photon totals (default 2 4 6; odd totals have zero "
                    "probability for a lossless device)");
    cmd->add_option("--n-max", similarity->n_max, "Per-mode photon cap")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--method", similarity->method,
                    "exact enumeration, Monte Carlo, or device sampling")
        ->check(CLI::IsMember({"exact", "mc", "sampling"}));
    cmd->add_option("--n-mc", similarity->n_mc,
                    "Monte Carlo draws per event (method mc)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", similarity->out, "Output feature table (CSV)")
        ->required();
    similarity->s.attach(cmd);
    // Sampling happens only for --method sampling; exact and mc need no count.
    cmd->get_option("--samples")->required(false);
    cmd->callback([similarity] { similarity->run(); });
  }

  auto points = std::make_shared<PointsCmd>();
  {
    CLI::App* cmd = app.add_subcommand(
        "points", "Sample point processes over coordinates with an RBF kernel");
    cmd->add_option("--coords", points->coords,
                    "Point coordinates (CSV, one point per row)")
        ->required();
    cmd->add_option("--sigma", points->sigma, "RBF kernel length scale")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--n-mean", points->n_mean, "Mean total count")->required();
    cmd->add_option("--process", points->process, "Point process family")
        ->check(CLI::IsMember({"permanental", "hafnian"}));
    cmd->add_option("--n-points", points->n_points,
                    "Condition on exactly this many points (permanental only)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-tries", points->max_tries,
                    "Rejection attempts per conditioned sample")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", points->out, "Output samples file (JSON lines)")
        ->required();
    cmd->add_option("--svg", points->svg,
                    "Also draw the points with the first sample highlighted");
    points->s.attach(cmd);
    cmd->callback([points] { points->run(); });
  }

  auto vibronic = std::make_shared<VibronicCmd>();
  {
    CLI::App* cmd = app.add_subcommand(
        "vibronic", "Sample a vibronic spectrum from molecular data");
    cmd->add_option("--input", vibronic->input,
                    "Molecule description (JSON with w, wp, Ud, delta, T)")
        ->required();
    cmd->add_option("--bin-width", vibronic->bin_width,
                    "Histogram bin width in wavenumbers");
    cmd->add_option("--gamma", vibronic->gamma,
                    "Lorentzian broadening half-width in wavenumbers");
    cmd->add_option("--lo", vibronic->lo,
                    "Window lower edge (default: cover the data)");
    cmd->add_option("--hi", vibronic->hi,
                    "Window upper edge (default: cover the data)");
    cmd->add_option("--out", vibronic->out, "Output spectrum file (CSV)")
        ->required();
    cmd->add_option("--svg", vibronic->svg,
                    "Spectrum drawing path (default: output with .svg)");
    vibronic->s.attach(cmd);
    cmd->callback([vibronic] { vibronic->run(); });
  }

  auto gen = std::make_shared<GenCmd>();
  {
    CLI::App* cmd = app.add_subcommand("gen", "Generate benchmark graphs");
    CLI::App* planted = cmd->add_subcommand(
        "planted", "Random graph with a planted dense subgraph on the last 10 nodes");
    planted->add_option("--seed", gen->seed, "Random seed (default 0)");
    planted->add_option("--out", gen->out, "Output graph file (JSON)")->required();
    planted->callback([gen] {
      gen->kind = "planted";
      gen->run();
    });
    CLI::App* er = cmd->add_subcommand("er", "Erdos-Renyi random graph");
    er->add_option("--nodes", gen->nodes, "Number of nodes")
        ->check(CLI::PositiveNumber);
    er->add_option("--p", gen->p, "Edge probability");
    er->add_option("--seed", gen->seed, "Random seed (default 0)");
    er->add_option("--out", gen->out, "Output graph file (JSON)")->required();
    er->callback([gen] {
      gen->kind = "er";
      gen->run();
    });
    cmd->require_subcommand(1);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const resource_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace gbs
