#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "epprobit/dataset.hpp"
#include "epprobit/ep.hpp"
#include "epprobit/posterior.hpp"
#include "epprobit/predictive.hpp"
#include "epprobit/simstudy.hpp"

namespace epprobit {

// Parse failure with 1-based line/column location.
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, int line, int column)
        : std::runtime_error(what), line(line), column(column) {}
    const int line;
    const int column;
};

// Dataset CSV: header row, first column y in {0,1}, then the p covariate
// columns. The file carries no prior variance; the caller supplies it.
// Covariates are written with 17 significant digits so a write/read
// round trip reproduces the doubles exactly.
Dataset read_dataset_csv(const std::string& path, double prior_variance);
void write_dataset_csv(const Dataset& data, const std::string& path);

// Covariate-only CSV (header + p columns per row), used for test units.
Eigen::MatrixXd read_covariates_csv(const std::string& path);
void write_covariates_csv(const Eigen::MatrixXd& X, const std::string& path);

// Plain decimal rendering with 12 significant digits (no exponent),
// period decimal separator regardless of locale.
std::string format_probability(double value);
void write_probabilities(const std::vector<PredictiveResult>& preds, const std::string& path);

// Study report CSV with the fixed header
// scenario,p,median_abs_diff,q1,q3,ep_seconds,baseline_seconds,ep_sweeps,skipped_updates
void write_report_csv(const StudyReport& report, const std::string& path);

// Fitted-model container: version-tagged binary file, little-endian 64-bit
// floats throughout. Holds xi, the covariance representation (dense matrix
// or low-rank factors), the site parameters, the prior variance and the
// fit diagnostics.
struct ModelArtifact {
    GaussianPosterior posterior;
    SiteState sites;
    FitDiagnostics diagnostics;
    double prior_variance = 0.0;
};

void write_model(const ModelArtifact& model, const std::string& path);
ModelArtifact read_model(const std::string& path);

// Human-readable dump of the same content, for debugging.
void write_model_text(const ModelArtifact& model, const std::string& path);

}  // namespace epprobit
