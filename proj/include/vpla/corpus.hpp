#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vpla/mining.hpp"

namespace vpla {

struct PreprocessOptions {
  bool expand_edge_params = false;
  std::string corpus_id;  // defaults to the first path's file name
};

struct CorpusManifest {
  std::string corpus_id;
  std::vector<std::string> source_paths;  // project files, sorted
  std::size_t total = 0;
  std::size_t dropped_faulty = 0;
  std::size_t dropped_empty = 0;
  std::size_t retained = 0;
  bool expand_edge_params = false;
  /// path -> reason for every dropped faulty file
  std::map<std::string, std::string> faults;
};

struct PreprocessResult {
  std::vector<ProjectGraph> projects;
  std::vector<std::string> retained_paths;
  CorpusManifest manifest;
};

/// Paths may be project files or directories (their *.json files). Files
/// that fail to parse or validate are dropped as faulty, graphs without
/// nodes as empty. Throws NoReadablePaths when nothing can be read.
PreprocessResult preprocess(const std::vector<std::string>& paths, const PreprocessOptions& options = {});

/// Project files named by `paths` (directories expanded, sorted).
std::vector<std::string> project_files(const std::vector<std::string>& paths);

Json manifest_to_json(const CorpusManifest& m);

struct Motif {
  std::string name;
  ProjectGraph graph;
  /// Fraction of projects the motif is planted in (rounded to a count).
  double frequency = 0.5;
};

struct GeneratorOptions {
  std::uint64_t seed = 1;
  std::size_t n_projects = 10;
  std::vector<std::string> block_alphabet = {"AND", "OR", "NOT", "TIMER", "COUNTER", "COMPARE", "ADD", "MUL"};
  std::vector<Motif> motifs;
  /// Noise nodes per project = round(noise_rate * planted nodes) + noise
  /// edges of the same count.
  double noise_rate = 0.3;
  bool with_layout = true;
};

struct GeneratedCorpus {
  std::vector<ProjectGraph> projects;
  /// motif name -> indices of the projects it was planted in
  std::map<std::string, std::vector<std::size_t>> planted;
};

GeneratedCorpus generate_corpus(const GeneratorOptions& options);

/// Small chain/fan motifs over the default alphabet, for demos and tests.
std::vector<Motif> default_motifs();

struct PipelineOptions {
  int minsup = 0;  // 0 = default_minsup(retained)
  std::size_t max_pattern_nodes = 6;
  bool expand_edge_params = false;
  std::string corpus_id;
  /// Timestamp recorded in the table; empty = SOURCE_DATE_EPOCH or epoch 0.
  std::string mined_at;
  /// When set, table.json and manifest.json are written there.
  std::string output_dir;
};

struct PipelineResult {
  StructuralTable table;
  CorpusManifest manifest;
  std::size_t pattern_count = 0;
};

PipelineResult run_pipeline(const std::vector<std::string>& paths, const PipelineOptions& options = {});

/// Table built from an in-memory corpus (no files involved).
StructuralTable build_table(const std::vector<ProjectGraph>& corpus, const PipelineOptions& options,
                            std::size_t* pattern_count = nullptr);

}  // namespace vpla
