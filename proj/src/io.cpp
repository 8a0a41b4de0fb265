#include "geosw/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace geosw::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file: " + path);
  out << content;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (first) {
      first = false;
      if (!is_number(parts[0])) continue;  // header row
    }
    std::vector<double> row;
    for (const auto& p : parts) {
      if (!is_number(p)) throw InvalidInput(path + ": non-numeric value '" + p + "'");
      row.push_back(std::strtod(p.c_str(), nullptr));
    }
    if (!rows.empty() && row.size() != rows[0].size()) {
      throw InvalidInput(path + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput(path + ": no data rows");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
    }
  }
  return m;
}

void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file: " + path);
  if (!header.empty()) {
    for (std::size_t k = 0; k < header.size(); ++k) {
      out << (k ? "," : "") << header[k];
    }
    out << "\n";
  }
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c) {
      out << (c ? "," : "") << format_double(m(r, c));
    }
    out << "\n";
  }
}

SupportModel read_support(const std::string& path, double epsilon) {
  const Eigen::MatrixXd points = read_csv_matrix(path);
  if (epsilon <= 0.0) epsilon = default_epsilon(points);
  return build_support(points, epsilon);
}

void write_support(const std::string& path, const SupportModel& support) {
  write_csv_matrix(path, support.points);
}

std::vector<DiscreteMeasure> read_measures(const std::string& path) {
  const Eigen::MatrixXd m = read_csv_matrix(path);
  std::vector<DiscreteMeasure> out;
  for (long r = 0; r < m.rows(); ++r) {
    out.push_back(DiscreteMeasure::from_weights(m.row(r).transpose()));
  }
  return out;
}

void write_measures(const std::string& path, const std::vector<DiscreteMeasure>& measures) {
  if (measures.empty()) throw InvalidInput("write_measures: nothing to write");
  Eigen::MatrixXd m(measures.size(), measures[0].size());
  for (std::size_t r = 0; r < measures.size(); ++r) {
    m.row(static_cast<long>(r)) = measures[r].weights.transpose();
  }
  write_csv_matrix(path, m);
}

std::vector<int> read_labels(const std::string& path) {
  const Eigen::MatrixXd m = read_csv_matrix(path);
  std::vector<int> labels;
  for (long r = 0; r < m.rows(); ++r) labels.push_back(static_cast<int>(m(r, 0)));
  return labels;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file: " + path);
  for (int l : labels) out << l << "\n";
}

bench::EmbeddingTable read_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file: " + path);
  bench::EmbeddingTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() < 2) throw InvalidInput(path + ": embedding row needs token + coordinates");
    std::vector<double> coords;
    for (std::size_t k = 1; k < parts.size(); ++k) {
      if (!is_number(parts[k])) {
        throw InvalidInput(path + ": non-numeric coordinate '" + parts[k] + "'");
      }
      coords.push_back(std::strtod(parts[k].c_str(), nullptr));
    }
    table.tokens.push_back(parts[0]);
    rows.push_back(std::move(coords));
  }
  if (rows.empty()) throw InvalidInput(path + ": empty embedding table");
  table.vectors.resize(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw InvalidInput(path + ": ragged embedding rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.vectors(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
    }
  }
  table.rebuild_index();
  return table;
}

void write_embeddings(const std::string& path, const bench::EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file: " + path);
  for (std::size_t r = 0; r < table.tokens.size(); ++r) {
    out << table.tokens[r];
    for (long c = 0; c < table.vectors.cols(); ++c) {
      out << "," << format_double(table.vectors(static_cast<long>(r), c));
    }
    out << "\n";
  }
}

std::vector<bench::Document> read_documents(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::vector<bench::Document> docs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 3) throw InvalidInput(path + ": expected id,label,tokens");
    if (parts[0] == "id" && parts[1] == "label") continue;  // header
    bench::Document doc;
    doc.id = parts[0];
    doc.label = std::stoi(parts[1]);
    std::istringstream toks(parts[2]);
    std::string item;
    while (toks >> item) {
      const auto colon = item.rfind(':');
      if (colon == std::string::npos) throw InvalidInput(path + ": token entry needs token:count");
      doc.token_counts.emplace_back(item.substr(0, colon),
                                    std::strtod(item.c_str() + colon + 1, nullptr));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void write_documents(const std::string& path, const std::vector<bench::Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file: " + path);
  out << "id,label,tokens\n";
  for (const auto& doc : docs) {
    out << doc.id << "," << doc.label << ",";
    for (std::size_t k = 0; k < doc.token_counts.size(); ++k) {
      out << (k ? " " : "") << doc.token_counts[k].first << ":"
          << format_double(doc.token_counts[k].second);
    }
    out << "\n";
  }
}

namespace {

wdl::AtomInit atom_init_from_string(const std::string& s) {
  if (s == "random_simplex") return wdl::AtomInit::RandomSimplex;
  if (s == "random_data") return wdl::AtomInit::RandomData;
  if (s == "wasserstein_kmeanspp") return wdl::AtomInit::WassersteinKmeanspp;
  throw InvalidInput("unknown atom_init: " + s);
}

wdl::WeightInit weight_init_from_string(const std::string& s) {
  if (s == "uniform_simplex") return wdl::WeightInit::UniformSimplex;
  if (s == "histogram_regression") return wdl::WeightInit::HistogramRegression;
  if (s == "quadratic_program") return wdl::WeightInit::QuadraticProgram;
  throw InvalidInput("unknown weight_init: " + s);
}

SimplexSampler sampler_from_string(const std::string& s) {
  if (s == "exponential_gaps") return SimplexSampler::ExponentialGaps;
  if (s == "normalized_uniform") return SimplexSampler::NormalizedUniform;
  throw InvalidInput("unknown simplex_sampler: " + s);
}

std::string atom_init_to_string(wdl::AtomInit v) {
  switch (v) {
    case wdl::AtomInit::RandomSimplex: return "random_simplex";
    case wdl::AtomInit::RandomData: return "random_data";
    case wdl::AtomInit::WassersteinKmeanspp: return "wasserstein_kmeanspp";
  }
  return "";
}

std::string weight_init_to_string(wdl::WeightInit v) {
  switch (v) {
    case wdl::WeightInit::UniformSimplex: return "uniform_simplex";
    case wdl::WeightInit::HistogramRegression: return "histogram_regression";
    case wdl::WeightInit::QuadraticProgram: return "quadratic_program";
  }
  return "";
}

std::string sampler_to_string(SimplexSampler v) {
  return v == SimplexSampler::ExponentialGaps ? "exponential_gaps" : "normalized_uniform";
}

}  // namespace

wdl::FitConfig fit_config_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  wdl::FitConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "rho") cfg.rho = value.get<double>();
    else if (key == "outer_iters") cfg.outer_iters = value.get<int>();
    else if (key == "sinkhorn_iters") cfg.sinkhorn_iters = value.get<int>();
    else if (key == "learning_rate") cfg.learning_rate = value.get<double>();
    else if (key == "adam_beta1") cfg.adam_beta1 = value.get<double>();
    else if (key == "adam_beta2") cfg.adam_beta2 = value.get<double>();
    else if (key == "adam_eps") cfg.adam_eps = value.get<double>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "atom_init") cfg.atom_init = atom_init_from_string(value.get<std::string>());
    else if (key == "weight_init") cfg.weight_init = weight_init_from_string(value.get<std::string>());
    else if (key == "simplex_sampler") cfg.simplex_sampler = sampler_from_string(value.get<std::string>());
    else throw InvalidInput("fit config: unknown field '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

std::string fit_config_to_json(const wdl::FitConfig& cfg) {
  nlohmann::json j;
  j["rho"] = cfg.rho;
  j["outer_iters"] = cfg.outer_iters;
  j["sinkhorn_iters"] = cfg.sinkhorn_iters;
  j["learning_rate"] = cfg.learning_rate;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["adam_eps"] = cfg.adam_eps;
  j["seed"] = cfg.seed;
  j["atom_init"] = atom_init_to_string(cfg.atom_init);
  j["weight_init"] = weight_init_to_string(cfg.weight_init);
  j["simplex_sampler"] = sampler_to_string(cfg.simplex_sampler);
  return j.dump(2);
}

std::string diagnostics_to_json(const Diagnostics& diagnostics) {
  nlohmann::json j;
  j["floored_logs"] = diagnostics.floored_logs;
  j["cost_shift"] = diagnostics.cost_shift;
  j["notes"] = diagnostics.notes;
  return j.dump(2);
}

}  // namespace geosw::io
