#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "geosw/datasets.hpp"
#include "geosw/types.hpp"
#include "geosw/wdl.hpp"

namespace geosw::io {

/// Doubles are printed with enough digits to round-trip exactly.
std::string format_double(double x);

Eigen::MatrixXd read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});

/// Support file: one row per point, d coordinate columns. epsilon <= 0 picks
/// the default rule.
SupportModel read_support(const std::string& path, double epsilon);
void write_support(const std::string& path, const SupportModel& support);

/// Measure file: one row per measure, N weight columns.
std::vector<DiscreteMeasure> read_measures(const std::string& path);
void write_measures(const std::string& path, const std::vector<DiscreteMeasure>& measures);

std::vector<int> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<int>& labels);

/// Embedding table: token in column 1, d coordinate columns.
bench::EmbeddingTable read_embeddings(const std::string& path);
void write_embeddings(const std::string& path, const bench::EmbeddingTable& table);

/// Document file: id,label,tokens with tokens a space-separated list of
/// token:count pairs.
std::vector<bench::Document> read_documents(const std::string& path);
void write_documents(const std::string& path, const std::vector<bench::Document>& docs);

/// FitConfig from a JSON document mirroring the field names; unknown fields
/// are rejected.
wdl::FitConfig fit_config_from_json(const std::string& text);
std::string fit_config_to_json(const wdl::FitConfig& config);

std::string diagnostics_to_json(const Diagnostics& diagnostics);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace geosw::io
