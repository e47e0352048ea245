#pragma once

// JSON model configuration ("schema": "singular-ext/1") and instantiation of
// the operator, family and Gram matrix it describes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "singext/a_model.hpp"
#include "singext/model_space.hpp"

namespace singext {

inline constexpr const char* kSchema = "singular-ext/1";

struct OperatorSpec {
  std::string law = "power";  // power | explicit
  PowerLaw power;
  std::size_t n = 2000;
  double z1 = -1.0;
  std::vector<double> eigenvalues;
};

struct FamilySpec {
  int m = 2;
  int d = 1;
  std::string law = "power";  // power | explicit
  std::optional<double> alpha;
  std::optional<double> beta;
  std::vector<Vec> explicit_phi;
};

struct GramPerturbation {
  int sigma = 1, j = 1, sigma2 = 1, j2 = 1;  // 1-based
  cplx value;
};

struct GramSource {
  std::string mode = "tilde";  // tilde | explicit | antitriangular
  Mat matrix;
  std::vector<double> antidiagonals;
  double coupling = 0.0;
  std::vector<GramPerturbation> perturb;
};

struct Tolerances {
  double identity = 1e-10;
  double pairing = 1e-6;
  double simplicity = 1e-6;
  double negativity = 1e-9;
};

struct ModelConfig {
  OperatorSpec op;
  FamilySpec family;
  GramSource gram;
  ThetaRelation theta;
  bool theta_given = false;
  std::vector<cplx> grid;
  Tolerances tol;
  std::uint64_t seed = 20240601;
  char model = 'b';
  std::string hash;  // FNV-1a of the canonical JSON text
  nlohmann::json raw;
};

// Throws Error(Config) with a line number (syntax) or JSON pointer (fields).
ModelConfig parse_config(const std::string& text);
ModelConfig load_config(const std::string& path);

// "x+yi"-free complex list: "re,im;re,im;..." or "ladder:start,ratio,count[,shift]".
std::vector<cplx> parse_grid(const std::string& spec);
// "re" or "re,im"
cplx parse_complex(const std::string& text);

std::vector<cplx> default_grid();

struct ModelInstance {
  SpectralOperator op;
  SingularFamily fam;
  GramSpec gram;
  std::optional<GramTilde> tilde;  // present when G_A = G~_A
};

// Builds the model; n_override > 0 replaces the truncation N.
ModelInstance instantiate(const ModelConfig& cfg, std::size_t n_override = 0);

nlohmann::json complex_to_json(cplx z);
nlohmann::json matrix_to_json(const Mat& a);
nlohmann::json vector_to_json(const Vec& v);
Vec vector_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace singext
