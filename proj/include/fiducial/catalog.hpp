#pragma once

#include <string>
#include <vector>

#include "fiducial/model.hpp"
#include "fiducial/models/behrens_fisher.hpp"
#include "fiducial/models/beta.hpp"
#include "fiducial/models/bivariate_normal.hpp"
#include "fiducial/models/gamma.hpp"
#include "fiducial/models/normal.hpp"
#include "fiducial/models/pareto.hpp"
#include "fiducial/models/quadreg.hpp"

namespace fiducial {

inline std::vector<std::string> model_names() {
  return {"normal", "pareto", "quadreg", "gamma", "beta", "behrens_fisher", "bivariate_normal"};
}

/// Builds the named model family; throws DomainError for unknown names.
inline ModelSpec make_model(const std::string& name) {
  if (name == "normal") return models::make_normal_model();
  if (name == "pareto") return models::make_pareto_model();
  if (name == "quadreg") return models::make_quadreg_model();
  if (name == "gamma") return models::make_gamma_model();
  if (name == "beta") return models::make_beta_model();
  if (name == "behrens_fisher") return models::make_behrens_fisher_model();
  if (name == "bivariate_normal") return models::make_bivariate_normal_model();
  throw DomainError("unknown model '" + name + "'");
}

}  // namespace fiducial
