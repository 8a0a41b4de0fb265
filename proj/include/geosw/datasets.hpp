#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "geosw/rng.hpp"
#include "geosw/types.hpp"

namespace geosw::bench {

struct SyntheticClassSpec {
  std::vector<DiscreteMeasure> atoms;  // generating measures of this class
  int samples = 0;
};

struct SyntheticSpec {
  std::vector<SyntheticClassSpec> classes;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  std::vector<DiscreteMeasure> data;
  std::vector<Eigen::VectorXd> true_weights;  // per sample, one entry per class atom
  std::vector<int> labels;
};

/// Per class, draws weights uniformly on the class simplex and emits the
/// entropic barycenters of the class atoms at those weights.
SyntheticData generate_synthetic(const SyntheticSpec& spec, const SupportModel& support,
                                 int iters);

/// Regular grid on [0, 1]^2 (row-major), with the default epsilon rule when
/// epsilon <= 0.
SupportModel make_grid_support(int rows, int cols, double epsilon);

/// Gaussian-bump atoms for grid recovery runs: class centers sit on a circle
/// of `class_radius` around the grid center, atoms jitter around their class
/// center within `atom_jitter`.
std::vector<std::vector<DiscreteMeasure>> grid_class_atoms(const SupportModel& grid, int classes,
                                                           int atoms_per_class, double sigma,
                                                           double class_radius,
                                                           double atom_jitter, Rng& rng);

// ---- document corpora ----

struct Document {
  std::string id;
  int label = -1;
  std::vector<std::pair<std::string, double>> token_counts;
};

struct EmbeddingTable {
  std::vector<std::string> tokens;
  Eigen::MatrixXd vectors;  // one row per token
  std::unordered_map<std::string, int> index;

  void rebuild_index();
};

struct VocabularyPolicy {
  std::vector<int> training_docs;  // the support is the union of their tokens
};

struct IngestResult {
  SupportModel support;
  std::vector<std::string> vocabulary;    // support row -> token
  std::vector<DiscreteMeasure> measures;  // one per input document, same order
  long dropped_tokens = 0;                // out-of-vocabulary occurrences
  Diagnostics diagnostics;
};

/// Documents become normalized token counts over the union vocabulary of the
/// training documents. Out-of-vocabulary tokens of other documents are
/// dropped and counted; a document left with no mass is an error, as is a
/// training token without an embedding.
IngestResult ingest_documents(const std::vector<Document>& docs, const EmbeddingTable& embeddings,
                              const VocabularyPolicy& policy, double epsilon);

/// Synthetic corpus generator with Gaussian-cluster vocabularies: class
/// vocabularies sit around class centers in embedding space, each class owns
/// a few subtopic word distributions, and a document is a multinomial draw
/// from a log-normally perturbed mixture of its class subtopics. Subtopics
/// make classes multimodal, so a class is a low-dimensional family rather
/// than a single noisy prototype.
struct DocGenConfig {
  int classes = 5;
  int vocab_per_class = 8;
  int shared_vocab = 16;
  int embed_dim = 2;
  double cluster_spread = 0.18;  // within-class embedding scatter
  double temperature = 0.6;      // word distribution sharpness around subtopic centers
  int subtopics = 2;             // subtopic distributions per class
  double subtopic_spread = 0.6;  // subtopic center scatter around the class center
  double doc_log_noise = 0.25;   // per-document log-normal perturbation
  int tokens_per_doc = 64;
};

struct GeneratedCorpus {
  std::vector<Document> docs;
  EmbeddingTable embeddings;
};

GeneratedCorpus generate_documents(const DocGenConfig& config, int docs_per_class, Rng& rng);

/// Quantile-aligned 1D chunk instance: measure_a places chunk k of mass
/// weights[k] at a[k], measure_b at b[k], and the support grid contains the
/// exact doubles (1-t) a[k] + t b[k] for every requested time, so
/// displacement interpolation lands on grid points without splitting.
struct ChunkInstance1D {
  SupportModel support;
  DiscreteMeasure measure_a;
  DiscreteMeasure measure_b;
  std::vector<double> a, b, weights, times;

  /// Measure with chunk k at (1-t) a[k] + t b[k]; t must be a covered time.
  DiscreteMeasure interpolate(double t) const;
};

ChunkInstance1D make_chunk_instance_1d(const std::vector<double>& a,
                                       const std::vector<double>& b,
                                       const std::vector<double>& weights,
                                       const std::vector<double>& times, double epsilon,
                                       const std::vector<double>& extra_points = {});

/// Random instance whose b-positions extend beyond the a-positions by at
/// least `min_extension` of the base length; the mid measure sits at
/// parameter r and the grid covers interpolating toward it at every sampled
/// t. Fixture for geodesic-extension sweeps.
ChunkInstance1D random_extension_instance_1d(Rng& rng, int chunks, double r,
                                             const std::vector<double>& t_samples,
                                             double min_extension, double epsilon);

}  // namespace geosw::bench
