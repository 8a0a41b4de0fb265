#include "geosw/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "geosw/ot.hpp"

namespace geosw::bench {

SyntheticData generate_synthetic(const SyntheticSpec& spec, const SupportModel& support,
                                 int iters) {
  if (spec.classes.empty()) throw InvalidInput("generate_synthetic: no classes");
  for (const auto& cls : spec.classes) {
    if (cls.atoms.empty()) throw InvalidInput("generate_synthetic: class without atoms");
    if (cls.samples < 0) throw InvalidInput("generate_synthetic: negative sample count");
  }

  Rng rng(spec.seed);
  SyntheticData out;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const auto& cls = spec.classes[c];
    const int k = static_cast<int>(cls.atoms.size());
    for (int s = 0; s < cls.samples; ++s) {
      const Eigen::VectorXd lambda = rng.simplex(k);
      out.data.push_back(ot::ibp_barycenter(cls.atoms, lambda, support, iters).barycenter);
      out.true_weights.push_back(lambda);
      out.labels.push_back(static_cast<int>(c));
    }
  }
  return out;
}

SupportModel make_grid_support(int rows, int cols, double epsilon) {
  if (rows < 1 || cols < 1) throw InvalidInput("make_grid_support: empty grid");
  Eigen::MatrixXd points(rows * cols, 2);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      points(r * cols + c, 0) = rows > 1 ? static_cast<double>(r) / (rows - 1) : 0.5;
      points(r * cols + c, 1) = cols > 1 ? static_cast<double>(c) / (cols - 1) : 0.5;
    }
  }
  if (epsilon <= 0.0) epsilon = default_epsilon(points);
  return build_support(points, epsilon);
}

std::vector<std::vector<DiscreteMeasure>> grid_class_atoms(const SupportModel& grid, int classes,
                                                           int atoms_per_class, double sigma,
                                                           double class_radius,
                                                           double atom_jitter, Rng& rng) {
  if (classes < 1 || atoms_per_class < 1) throw InvalidInput("grid_class_atoms: empty request");
  std::vector<std::vector<DiscreteMeasure>> out(classes);
  for (int c = 0; c < classes; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / classes;
    const Eigen::RowVector2d center(0.5 + class_radius * std::cos(angle),
                                    0.5 + class_radius * std::sin(angle));
    for (int a = 0; a < atoms_per_class; ++a) {
      const double ja = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double jr = atom_jitter * std::sqrt(rng.uniform());
      const Eigen::RowVector2d bump = center + Eigen::RowVector2d(jr * std::cos(ja), jr * std::sin(ja));
      Eigen::VectorXd w(grid.size());
      for (int i = 0; i < grid.size(); ++i) {
        w[i] = std::exp(-(grid.points.row(i) - bump).squaredNorm() / (2.0 * sigma * sigma));
      }
      out[c].push_back(DiscreteMeasure::from_weights(w / w.sum()));
    }
  }
  return out;
}

void EmbeddingTable::rebuild_index() {
  index.clear();
  for (std::size_t k = 0; k < tokens.size(); ++k) index[tokens[k]] = static_cast<int>(k);
}

IngestResult ingest_documents(const std::vector<Document>& docs, const EmbeddingTable& embeddings,
                              const VocabularyPolicy& policy, double epsilon) {
  if (policy.training_docs.empty()) throw InvalidInput("ingest_documents: no training documents");

  std::set<std::string> vocab_set;
  for (int d : policy.training_docs) {
    if (d < 0 || d >= static_cast<int>(docs.size())) {
      throw InvalidInput("ingest_documents: training index out of range");
    }
    for (const auto& [token, count] : docs[d].token_counts) {
      if (count > 0.0) vocab_set.insert(token);
    }
  }

  IngestResult out;
  out.vocabulary.assign(vocab_set.begin(), vocab_set.end());
  const int n = static_cast<int>(out.vocabulary.size());
  if (n == 0) throw InvalidInput("ingest_documents: training documents are empty");

  Eigen::MatrixXd points(n, embeddings.vectors.cols());
  std::unordered_map<std::string, int> pos;
  for (int k = 0; k < n; ++k) {
    const auto it = embeddings.index.find(out.vocabulary[k]);
    if (it == embeddings.index.end()) {
      throw InvalidInput("ingest_documents: no embedding for training token '" +
                         out.vocabulary[k] + "'");
    }
    points.row(k) = embeddings.vectors.row(it->second);
    pos[out.vocabulary[k]] = k;
  }
  if (epsilon <= 0.0) epsilon = default_epsilon(points);
  out.support = build_support(points, epsilon);

  for (const auto& doc : docs) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    for (const auto& [token, count] : doc.token_counts) {
      if (count <= 0.0) continue;
      const auto it = pos.find(token);
      if (it == pos.end()) {
        out.dropped_tokens += static_cast<long>(std::llround(count));
      } else {
        w[it->second] += count;
      }
    }
    const double total = w.sum();
    if (!(total > 0.0)) {
      throw InvalidInput("ingest_documents: document '" + doc.id +
                         "' has no in-vocabulary tokens");
    }
    out.measures.push_back(DiscreteMeasure::from_weights(w / total));
  }
  return out;
}

GeneratedCorpus generate_documents(const DocGenConfig& config, int docs_per_class, Rng& rng) {
  if (config.classes < 1 || config.vocab_per_class < 1 || docs_per_class < 1) {
    throw InvalidInput("generate_documents: empty request");
  }

  GeneratedCorpus out;
  const int vocab = config.classes * config.vocab_per_class + config.shared_vocab;
  out.embeddings.vectors.resize(vocab, config.embed_dim);

  // Class vocabularies cluster around centers on the unit circle; the shared
  // pool scatters around the origin and is reachable from every class.
  std::vector<Eigen::VectorXd> centers(config.classes);
  for (int c = 0; c < config.classes; ++c) {
    centers[c] = Eigen::VectorXd::Zero(config.embed_dim);
    const double angle = 2.0 * std::numbers::pi * c / config.classes;
    centers[c][0] = std::cos(angle);
    if (config.embed_dim > 1) centers[c][1] = std::sin(angle);
  }
  int w = 0;
  for (int c = 0; c < config.classes; ++c) {
    for (int k = 0; k < config.vocab_per_class; ++k, ++w) {
      out.embeddings.tokens.push_back("w_c" + std::to_string(c) + "_" + std::to_string(k));
      for (int d = 0; d < config.embed_dim; ++d) {
        out.embeddings.vectors(w, d) = centers[c][d] + config.cluster_spread * rng.normal();
      }
    }
  }
  for (int k = 0; k < config.shared_vocab; ++k, ++w) {
    out.embeddings.tokens.push_back("w_shared_" + std::to_string(k));
    for (int d = 0; d < config.embed_dim; ++d) {
      out.embeddings.vectors(w, d) = 0.45 * rng.normal();
    }
  }
  out.embeddings.rebuild_index();

  for (int c = 0; c < config.classes; ++c) {
    std::vector<Eigen::VectorXd> subtopics;
    for (int s = 0; s < std::max(1, config.subtopics); ++s) {
      Eigen::VectorXd center = centers[c];
      for (int d = 0; d < config.embed_dim; ++d) {
        center[d] += config.subtopic_spread * rng.normal();
      }
      Eigen::VectorXd base(vocab);
      for (int k = 0; k < vocab; ++k) {
        const double dist2 =
            (out.embeddings.vectors.row(k).transpose() - center).squaredNorm();
        base[k] = std::exp(-dist2 / config.temperature);
      }
      subtopics.push_back(base / base.sum());
    }

    for (int d = 0; d < docs_per_class; ++d) {
      const Eigen::VectorXd mix = rng.simplex(static_cast<int>(subtopics.size()));
      Eigen::VectorXd theta = Eigen::VectorXd::Zero(vocab);
      for (std::size_t s = 0; s < subtopics.size(); ++s) theta += mix[static_cast<int>(s)] * subtopics[s];
      for (int k = 0; k < vocab; ++k) {
        theta[k] *= std::exp(config.doc_log_noise * rng.normal());
      }
      theta /= theta.sum();

      Document doc;
      doc.id = "c" + std::to_string(c) + "_d" + std::to_string(d);
      doc.label = c;
      std::vector<double> counts(vocab, 0.0);
      for (int t = 0; t < config.tokens_per_doc; ++t) {
        counts[rng.categorical(theta)] += 1.0;
      }
      for (int k = 0; k < vocab; ++k) {
        if (counts[k] > 0.0) doc.token_counts.emplace_back(out.embeddings.tokens[k], counts[k]);
      }
      out.docs.push_back(std::move(doc));
    }
  }
  return out;
}

DiscreteMeasure ChunkInstance1D::interpolate(double t) const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(support.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double p = (1.0 - t) * a[k] + t * b[k];
    bool placed = false;
    for (int i = 0; i < support.size(); ++i) {
      if (support.points(i, 0) == p) {
        w[i] += weights[k];
        placed = true;
        break;
      }
    }
    if (!placed) throw InvalidInput("ChunkInstance1D: time not covered by the instance grid");
  }
  return DiscreteMeasure::from_weights(w);
}

ChunkInstance1D make_chunk_instance_1d(const std::vector<double>& a,
                                       const std::vector<double>& b,
                                       const std::vector<double>& weights,
                                       const std::vector<double>& times, double epsilon,
                                       const std::vector<double>& extra_points) {
  if (a.size() != b.size() || a.size() != weights.size() || a.empty()) {
    throw InvalidInput("make_chunk_instance_1d: inconsistent chunk arrays");
  }
  ChunkInstance1D inst;
  inst.a = a;
  inst.b = b;
  inst.weights = weights;
  inst.times = times;

  std::vector<double> grid = extra_points;
  auto add_time = [&](double t) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      // Same expression shape as the displacement interpolation uses, so the
      // grid holds the exact doubles it will produce.
      grid.push_back((1.0 - t) * a[k] + t * b[k]);
    }
  };
  add_time(0.0);
  add_time(1.0);
  for (double t : times) add_time(t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  Eigen::MatrixXd points(grid.size(), 1);
  for (std::size_t k = 0; k < grid.size(); ++k) points(static_cast<long>(k), 0) = grid[k];
  inst.support = build_support(points, epsilon);

  inst.measure_a = inst.interpolate(0.0);
  inst.measure_b = inst.interpolate(1.0);
  return inst;
}

ChunkInstance1D random_extension_instance_1d(Rng& rng, int chunks, double r,
                                             const std::vector<double>& t_samples,
                                             double min_extension, double epsilon) {
  std::vector<double> a(chunks), b(chunks), w(chunks);
  for (int k = 0; k < chunks; ++k) a[k] = rng.uniform(0.0, 1.0);
  std::sort(a.begin(), a.end());
  const double stretch = 1.0 + min_extension + rng.uniform(0.0, 1.0);
  const double drift = rng.uniform(0.1, 0.6);
  for (int k = 0; k < chunks; ++k) b[k] = a[k] * stretch + drift;
  const Eigen::VectorXd wv = rng.simplex(chunks);
  for (int k = 0; k < chunks; ++k) w[k] = wv[k];

  std::vector<double> extra;
  for (double t : t_samples) {
    for (int k = 0; k < chunks; ++k) {
      const double v = (1.0 - r) * a[k] + r * b[k];
      extra.push_back((1.0 - t) * a[k] + t * v);
    }
  }
  return make_chunk_instance_1d(a, b, w, {r}, epsilon, extra);
}

}  // namespace geosw::bench
