#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gbs/graph.hpp"
#include "gbs/points.hpp"
#include "gbs/sampler.hpp"
#include "gbs/similarity.hpp"
#include "gbs/subgraph.hpp"
#include "gbs/vibronic.hpp"

namespace gbs {

// Bumped only when a file schema changes incompatibly; every emitted file
// carries it and every parser checks it.
inline constexpr int kFormatVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

// Emitters return the exact bytes that land on disk, so determinism can be
// checked without touching the filesystem.  Parsers take the content plus an
// origin label (usually the path) used to prefix error messages.

std::string read_file(const std::string& path);
// Writes to path + ".tmp" and renames, so readers never observe a torn file.
void write_file_atomic(const std::string& path, const std::string& content);

// FNV-1a (64-bit) over the raw bytes, rendered as "fnv1a64:<16 hex digits>".
std::string fnv1a64_hex(const std::string& bytes);

// Graphs: dense JSON ({"format_version", "adjacency": [[...], ...]}) or an
// edge-list CSV (u,v,weight per line); ingest_graph picks by extension.
Graph parse_graph_json(const std::string& text, const std::string& origin);
Graph parse_edge_csv(const std::string& text, const std::string& origin);
Graph ingest_graph(const std::string& path);
std::string graph_json(const Graph& g);

// Sample batches as JSON lines: a header object, then one object per sample.
std::string samples_jsonl(const SampleBatch& batch);
SampleBatch parse_samples_jsonl(const std::string& text,
                                const std::string& origin);

// Point coordinates: one point per row, comma-separated, consistent width.
StateSpace parse_points_csv(const std::string& text, const std::string& origin);
StateSpace ingest_points(const std::string& path);

// Vibronic inputs: JSON with keys w, wp, Ud, delta, T.
VibronicInput parse_vibronic_json(const std::string& text,
                                  const std::string& origin);
VibronicInput ingest_vibronic(const std::string& path);

// Result emitters.
std::string subgraph_json(const DenseSubgraphResult& result);
// Cliques are emitted largest first, ties broken lexicographically.
std::string clique_json(const std::vector<std::vector<int>>& cliques);
std::string spectrum_csv(const Spectrum& s);
// One row per graph; all feature vectors must share the same event list.
std::string feature_csv(const std::vector<std::string>& ids,
                        const std::vector<FeatureVector>& features);

// Deterministic SVG renderings: fixed layout and precision, no timestamps,
// byte-identical across runs for identical inputs.
std::string svg_graph(const Graph& g, const std::vector<int>& highlight);
// `counts` marks detections per point (empty means none); detected points are
// drawn highlighted with radius growing with the count.
std::string svg_points(const StateSpace& space, const std::vector<int>& counts);
std::string svg_spectrum(const Spectrum& s);

// Every run writes <out>.manifest.json describing what produced the output:
// subcommand, every effective flag value, seed, input hashes, output paths.
// wall_ms is informational and excluded from determinism guarantees.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> flags;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::string> outputs;
  std::int64_t wall_ms = 0;
};

std::string manifest_json(const RunManifest& m);
void write_manifest(const std::string& out_path, const RunManifest& m);

// Entry point shared by the gbs binary and the in-process CLI tests.
int cli_main(int argc, const char* const* argv);

}  // namespace gbs
