#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace aet {

enum class PairFamily { adapted, cutoff, custom };

std::string to_string(PairFamily family);
PairFamily family_from_name(const std::string& name);

/// Neumann boundary data (f1, f2) on the arc [0, ell] together with a dense
/// sample grid of the curve gamma(t) = (f1(t), f2(t)).
struct BoundaryPair {
    double ell = 0.0;
    PairFamily family = PairFamily::custom;
    int gamma_index = 0;  // i in 1..8 for the adapted and cutoff families, 0 otherwise
    std::function<double(double)> f1;
    std::function<double(double)> f2;
    std::vector<double> t;
    std::vector<double> g1;
    std::vector<double> g2;
};

/// Sample intervals: at least 1024, and 8192 per radian so the trapezoid residual
/// of smooth data stays below 1e-8.
std::size_t default_sample_intervals(double ell);

BoundaryPair make_pair(double ell, std::function<double(double)> f1, std::function<double(double)> f2,
                       PairFamily family = PairFamily::custom, int gamma_index = 0);

/// ell_i = i*pi/4 and (f1, f2) = (cos(8t/i), sin(8t/i)).
BoundaryPair adapted_pair(int i);

/// ell_i = i*pi/4 and (f1, f2) = (cos t - c1, sin t - c2), c the arc mean of (cos, sin).
BoundaryPair cutoff_pair(int i);

BoundaryPair family_pair(PairFamily family, int i);

/// Custom pair from (t, f1, f2) rows; evaluated by linear interpolation and
/// resampled onto the default grid. ell is the last t.
BoundaryPair pair_from_samples(std::vector<double> t, std::vector<double> f1, std::vector<double> f2);
BoundaryPair pair_from_csv(const std::string& path);

/// Smallest |gamma| over the sample grid.
double min_curve_norm(const BoundaryPair& pair);

/// Generalized winding number (arg(gamma(ell)) - arg(gamma(0))) / 2pi with the
/// argument tracked continuously. Throws when |gamma| <= 1e-9 at some sample.
double winding_index(const BoundaryPair& pair);

/// Largest argument step against the dominant direction (0 for a monotone curve).
double max_backward_step(const BoundaryPair& pair);

/// True iff every argument increment shares one sign or is within tol of zero.
bool argument_monotone(const BoundaryPair& pair, double tol = 1e-9);

/// Trapezoid quadrature of f1 and f2 over the arc.
std::pair<double, double> zero_mean_residual(const BoundaryPair& pair);

struct AdmissibilityTolerances {
    double min_norm = 1e-9;
    double residual = 1e-6;
    double monotone = 1e-9;
    double index = 1e-6;
    double max_gram_condition = 1e12;
};

struct AdmissibilityReport {
    double min_norm = 0.0;
    std::pair<double, double> zero_mean_residuals{0.0, 0.0};
    bool monotone = false;
    double max_backward_step = 0.0;
    double index = 0.0;
    bool index_defined = false;
    double gram_condition = 0.0;
    bool linearly_independent = false;
    bool admissible = false;

    std::string failure_summary() const;
    static std::string csv_header();
    std::string csv_row() const;
};

AdmissibilityReport check_admissibility(const BoundaryPair& pair, const AdmissibilityTolerances& tol = {});

}  // namespace aet
