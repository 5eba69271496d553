#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fieldlab/gaussian.hpp"
#include "fieldlab/maxstable.hpp"
#include "fieldlab/tailfields.hpp"

namespace fieldlab {

struct ParseIssue {
  int line = 0;
  std::string message;
};

struct TestParams {
  std::vector<Point> h_list;      // defaults to (0),(1),(2) for l=1
  std::vector<double> x_list{0.5, 1.0, 2.0};
  std::vector<double> n_list{8, 16, 32};
  int levels = 4;
  double block = 16;
  double r = 1.0;
  double tau = 0.0;
  double m_threshold = 50.0;
  std::vector<double> radii{2, 4, 6, 8};
  std::string method = "both";   // blocks | pil | both
  std::string variant = "ii";    // ii | iii
  double shift_radius = 1.0;
  std::vector<Point> points;     // defaults to (0),(1),(2) for l=1
  double eps = 1.0;
  std::vector<Point> k0;         // defaults to (0)
  double pil_radius = 8.0;
};

struct ExperimentConfig {
  enum class ModelKind { br, singleton, geometric, constant };

  ModelKind model_kind = ModelKind::br;
  SpectralModel br;
  SyntheticSpec synthetic;
  NormKind norm_kind = NormKind::alpha_sum;

  Eigen::MatrixXd lattice_matrix = Eigen::MatrixXd::Identity(1, 1);
  double window_radius = 4.0;

  McParams mc;
  DeHaanConfig dehaan;
  std::vector<std::pair<std::string, FunctionalSpec>> functionals;
  TestParams test;
  std::string out_dir = "out";

  double alpha() const {
    return model_kind == ModelKind::br ? br.alpha : synthetic.alpha;
  }
  int field_dim() const {
    return model_kind == ModelKind::br ? br.d : synthetic.d;
  }
  int lattice_dim() const { return static_cast<int>(lattice_matrix.rows()); }
  Lattice lattice() const { return Lattice::from_matrix(lattice_matrix); }
  HomogeneousNorm norm() const {
    return {norm_kind, alpha(), field_dim()};
  }

  // Sampler for the configured model on a window.
  std::shared_ptr<const FieldSampler> make_sampler(
      std::shared_ptr<const Window> w) const;

  std::string serialize() const;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ParseIssue> errors;
  bool ok() const { return config.has_value() && errors.empty(); }
};

// Sectioned key-value text; returns either a validated config or every
// error found, each with its line number.
ParseResult parse_config(const std::string& text);

ParseResult parse_config_file(const std::string& path);

}  // namespace fieldlab
