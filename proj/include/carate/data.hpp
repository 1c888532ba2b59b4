#ifndef CARATE_DATA_HPP_
#define CARATE_DATA_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace carate {

// Observed experiment: outcome, binary treatment, stratum label and an n x k
// covariate matrix (k may be zero).
struct Dataset {
  Eigen::VectorXd y;
  std::vector<int> a;
  std::vector<std::string> strata;
  Eigen::MatrixXd x;
  std::vector<std::string> covariate_names;

  std::size_t n() const { return a.size(); }
  std::size_t k() const { return static_cast<std::size_t>(x.cols()); }

  // Throws DataError if the columns disagree in length, n == 0, or some
  // treatment indicator is not 0/1.
  void check() const;

  // Rows in the given order, as a new dataset.
  Dataset subset(const std::vector<std::size_t>& rows) const;
};

// Column selection for CSV ingestion. Covariate entries are exact column
// names or shell-style globs ("X*"); matches keep file column order.
struct ColumnSpec {
  std::string outcome = "Y";
  std::string treatment = "A";
  std::string stratum = "S";
  std::vector<std::string> covariates;
};

Dataset load_dataset(const std::filesystem::path& path, const ColumnSpec& spec);
// Same as load_dataset, reading CSV text from memory.
Dataset parse_dataset(const std::string& csv_text, const ColumnSpec& spec);

struct StratumCells {
  std::string label;
  std::vector<std::size_t> members;  // all rows of the stratum
  std::vector<std::size_t> treated;
  std::vector<std::size_t> control;

  std::size_t size() const { return members.size(); }
  std::size_t arm_size(int arm) const {
    return arm == 1 ? treated.size() : control.size();
  }
  const std::vector<std::size_t>& arm(int a) const {
    return a == 1 ? treated : control;
  }
};

// Per-stratum row ids and counts; strata sorted lexicographically by label.
struct StrataIndex {
  std::size_t n = 0;
  std::vector<StratumCells> strata;
  std::vector<std::size_t> stratum_of_row;  // position in `strata`

  std::size_t num_strata() const { return strata.size(); }
  // Empirical share n_s / n.
  double share(std::size_t s) const;
  // Empirical propensity n_{1,s} / n_s.
  double propensity(std::size_t s) const;
};

StrataIndex build_index(const Dataset& d);

struct ValidationPolicy {
  // Minimum arm size for a stratum to be retained under drop_small_strata.
  // Zero means "k + 2", the estimability threshold.
  std::size_t min_arm_size = 0;
  bool drop_small_strata = false;
};

struct CellStatus {
  std::string stratum;
  int arm = 0;
  std::size_t size = 0;
  bool estimable = false;
  std::string reason;  // empty when estimable
};

struct ValidationReport {
  std::vector<CellStatus> cells;
  std::vector<std::string> dropped_strata;
  // Problems that remain after the drop policy is applied.
  std::vector<std::string> errors;

  bool adjusted_estimable() const { return errors.empty(); }
  bool unadjusted_estimable = true;
};

ValidationReport validate(const Dataset& d, const StrataIndex& idx,
                          const ValidationPolicy& policy);

// Drops the rows of the listed strata.
Dataset drop_strata(const Dataset& d, const std::vector<std::string>& labels);

}  // namespace carate

#endif  // CARATE_DATA_HPP_
