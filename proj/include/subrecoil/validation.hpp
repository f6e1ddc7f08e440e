#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subrecoil/ensemble.hpp"
#include "subrecoil/master_equation.hpp"

namespace subrecoil {

struct ComparisonEntry {
    std::string name;
    double time = 0.0;
    std::optional<double> simulated;  // stochastic ensemble mean
    std::optional<double> reference;  // dense-solution value
    double se = 0.0;
    double z = 0.0;
    bool pass = true;
};

struct OracleComparison {
    std::vector<ComparisonEntry> entries;  // all times, all record entries
    double max_z = 0.0;
    std::string worst_name;
    double worst_time = 0.0;
    bool pass = true;
};

// Entry-by-entry z-score comparison of the ensemble means against reference
// records on the same grid. Differences below atol pass outright (covers
// exactly conserved quantities whose standard error is zero); an entry
// defined on one side only fails.
OracleComparison compare_records(const EnsembleResult& ensemble,
                                 const std::vector<ObservableRecord>& reference,
                                 double z_limit = 3.0, double atol = 1e-9);

// Dense reference solution of the staged protocol, starting from the exact
// ensemble-averaged initial density, sampled on run_ensemble's grid.
std::vector<ObservableRecord> oracle_records(const EnsembleSpec& spec);

// One-sample Kolmogorov-Smirnov statistic against Exponential(rate) and the
// asymptotic p-value of the statistic at sample size n.
double ks_statistic_exponential(std::vector<double> samples, double rate);
double ks_asymptotic_p_value(double statistic, std::size_t n);

}  // namespace subrecoil
