#include "aet/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace aet {

namespace {

constexpr double kPi = std::numbers::pi;

void check_gamma_index(int i) {
    if (i < 1 || i > 8) throw std::invalid_argument("boundary pair index must lie in 1..8");
}

double wrap_angle(double a) {
    // into (-pi, pi]
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

std::vector<double> argument_increments(const BoundaryPair& pair) {
    const double m = min_curve_norm(pair);
    if (!(m > 1e-9)) {
        std::ostringstream msg;
        msg << "boundary curve passes through (near) zero: min |gamma| = " << m << "; argument undefined";
        throw std::domain_error(msg.str());
    }
    std::vector<double> inc(pair.t.size() - 1);
    for (std::size_t k = 0; k + 1 < pair.t.size(); ++k) {
        const double a0 = std::atan2(pair.g2[k], pair.g1[k]);
        const double a1 = std::atan2(pair.g2[k + 1], pair.g1[k + 1]);
        inc[k] = wrap_angle(a1 - a0);
    }
    return inc;
}

}  // namespace

std::string to_string(PairFamily family) {
    switch (family) {
        case PairFamily::adapted: return "adapted";
        case PairFamily::cutoff: return "cutoff";
        case PairFamily::custom: return "custom";
    }
    return "custom";
}

PairFamily family_from_name(const std::string& name) {
    if (name == "adapted") return PairFamily::adapted;
    if (name == "cutoff") return PairFamily::cutoff;
    if (name == "custom") return PairFamily::custom;
    throw std::invalid_argument("unknown boundary family '" + name + "' (expected adapted or cutoff)");
}

std::size_t default_sample_intervals(double ell) {
    return std::max<std::size_t>(1024, static_cast<std::size_t>(std::ceil(8192.0 * ell)));
}

BoundaryPair make_pair(double ell, std::function<double(double)> f1, std::function<double(double)> f2,
                       PairFamily family, int gamma_index) {
    if (!(ell > 0.0) || ell > 2.0 * kPi + 1e-12) throw std::invalid_argument("boundary pair: ell must lie in (0, 2pi]");
    BoundaryPair p;
    p.ell = ell;
    p.family = family;
    p.gamma_index = gamma_index;
    p.f1 = std::move(f1);
    p.f2 = std::move(f2);
    const auto n = default_sample_intervals(ell);
    p.t.resize(n + 1);
    p.g1.resize(n + 1);
    p.g2.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = (k == n) ? ell : ell * double(k) / double(n);
        p.t[k] = t;
        p.g1[k] = p.f1(t);
        p.g2[k] = p.f2(t);
    }
    return p;
}

BoundaryPair adapted_pair(int i) {
    check_gamma_index(i);
    const double ell = i * kPi / 4.0;
    const double omega = 8.0 / i;
    return make_pair(
        ell, [omega](double t) { return std::cos(omega * t); }, [omega](double t) { return std::sin(omega * t); },
        PairFamily::adapted, i);
}

BoundaryPair cutoff_pair(int i) {
    check_gamma_index(i);
    const double ell = i * kPi / 4.0;
    double c1 = 0.0;
    double c2 = 0.0;
    if (i < 8) {
        c1 = std::sin(ell) / ell;
        c2 = (1.0 - std::cos(ell)) / ell;
    }
    return make_pair(
        ell, [c1](double t) { return std::cos(t) - c1; }, [c2](double t) { return std::sin(t) - c2; },
        PairFamily::cutoff, i);
}

BoundaryPair family_pair(PairFamily family, int i) {
    switch (family) {
        case PairFamily::adapted: return adapted_pair(i);
        case PairFamily::cutoff: return cutoff_pair(i);
        case PairFamily::custom: break;
    }
    throw std::invalid_argument("family_pair: custom pairs need explicit data");
}

BoundaryPair pair_from_samples(std::vector<double> t, std::vector<double> f1, std::vector<double> f2) {
    if (t.size() < 2 || f1.size() != t.size() || f2.size() != t.size()) {
        throw std::invalid_argument("custom boundary pair needs at least two (t, f1, f2) rows");
    }
    if (std::abs(t.front()) > 1e-12) throw std::invalid_argument("custom boundary pair must start at t = 0");
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        if (!(t[k + 1] > t[k])) throw std::invalid_argument("custom boundary pair: t must be strictly increasing");
    }
    // Tolerate a full circle written with limited precision.
    const double ell = t.back() > 2.0 * kPi && t.back() < 2.0 * kPi + 1e-4 ? 2.0 * kPi : t.back();
    auto interp = [t](std::vector<double> v) {
        return [t, v = std::move(v)](double s) {
            if (s <= t.front()) return v.front();
            if (s >= t.back()) return v.back();
            const auto it = std::upper_bound(t.begin(), t.end(), s);
            const auto k = static_cast<std::size_t>(it - t.begin()) - 1;
            const double w = (s - t[k]) / (t[k + 1] - t[k]);
            return (1.0 - w) * v[k] + w * v[k + 1];
        };
    };
    return make_pair(ell, interp(std::move(f1)), interp(std::move(f2)), PairFamily::custom, 0);
}

BoundaryPair pair_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open boundary CSV: " + path);
    std::vector<double> t, f1, f2;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double a, b, c;
        if (!(row >> a >> b >> c)) {
            if (t.empty()) continue;  // header
            throw std::runtime_error("malformed boundary CSV row: " + line);
        }
        t.push_back(a);
        f1.push_back(b);
        f2.push_back(c);
    }
    return pair_from_samples(std::move(t), std::move(f1), std::move(f2));
}

double min_curve_norm(const BoundaryPair& pair) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pair.t.size(); ++k) m = std::min(m, std::hypot(pair.g1[k], pair.g2[k]));
    return m;
}

double winding_index(const BoundaryPair& pair) {
    const auto inc = argument_increments(pair);
    double total = 0.0;
    for (double d : inc) total += d;
    return total / (2.0 * kPi);
}

double max_backward_step(const BoundaryPair& pair) {
    const auto inc = argument_increments(pair);
    double total = 0.0;
    for (double d : inc) total += d;
    const double dir = total >= 0.0 ? 1.0 : -1.0;
    double worst = 0.0;
    for (double d : inc) worst = std::max(worst, -dir * d);
    return worst;
}

bool argument_monotone(const BoundaryPair& pair, double tol) {
    const auto inc = argument_increments(pair);
    bool up = false;
    bool down = false;
    for (double d : inc) {
        if (d > tol) up = true;
        if (d < -tol) down = true;
    }
    return !(up && down);
}

std::pair<double, double> zero_mean_residual(const BoundaryPair& pair) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t k = 0; k + 1 < pair.t.size(); ++k) {
        const double h = pair.t[k + 1] - pair.t[k];
        s1 += 0.5 * h * (pair.g1[k] + pair.g1[k + 1]);
        s2 += 0.5 * h * (pair.g2[k] + pair.g2[k + 1]);
    }
    return {s1, s2};
}

AdmissibilityReport check_admissibility(const BoundaryPair& pair, const AdmissibilityTolerances& tol) {
    AdmissibilityReport r;
    r.min_norm = min_curve_norm(pair);
    r.zero_mean_residuals = zero_mean_residual(pair);
    if (r.min_norm > tol.min_norm) {
        r.index = winding_index(pair);
        r.index_defined = true;
        r.max_backward_step = max_backward_step(pair);
        r.monotone = argument_monotone(pair, tol.monotone);
    }

    // Gram matrix of the samples with trapezoid weights.
    double a = 0.0, b = 0.0, c = 0.0;
    for (std::size_t k = 0; k < pair.t.size(); ++k) {
        double w = 0.0;
        if (k > 0) w += 0.5 * (pair.t[k] - pair.t[k - 1]);
        if (k + 1 < pair.t.size()) w += 0.5 * (pair.t[k + 1] - pair.t[k]);
        a += w * pair.g1[k] * pair.g1[k];
        b += w * pair.g1[k] * pair.g2[k];
        c += w * pair.g2[k] * pair.g2[k];
    }
    const double mean = 0.5 * (a + c);
    const double spread = std::hypot(0.5 * (a - c), b);
    const double lo = mean - spread;
    const double hi = mean + spread;
    r.gram_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    r.linearly_independent = r.gram_condition < tol.max_gram_condition;

    r.admissible = r.min_norm > tol.min_norm && std::abs(r.zero_mean_residuals.first) < tol.residual &&
                   std::abs(r.zero_mean_residuals.second) < tol.residual && r.monotone && r.index_defined &&
                   std::abs(r.index) <= 1.0 + tol.index && r.linearly_independent;
    return r;
}

std::string AdmissibilityReport::failure_summary() const {
    if (admissible) return {};
    std::ostringstream s;
    const char* sep = "";
    auto add = [&](const std::string& m) {
        s << sep << m;
        sep = "; ";
    };
    if (!index_defined) add("curve vanishes (min |gamma| = " + std::to_string(min_norm) + ")");
    if (std::abs(zero_mean_residuals.first) >= 1e-6 || std::abs(zero_mean_residuals.second) >= 1e-6) {
        add("boundary functions do not integrate to zero");
    }
    if (index_defined && !monotone) add("argument is not monotone");
    if (index_defined && std::abs(index) > 1.0 + 1e-6) add("|Ind| = " + std::to_string(std::abs(index)) + " > 1");
    if (!linearly_independent) add("functions are linearly dependent");
    return s.str();
}

std::string AdmissibilityReport::csv_header() {
    return "min_norm,residual_f1,residual_f2,monotone,max_backward_step,index,gram_condition,linearly_independent,"
           "admissible";
}

std::string AdmissibilityReport::csv_row() const {
    std::ostringstream s;
    s.precision(12);
    s << min_norm << ',' << zero_mean_residuals.first << ',' << zero_mean_residuals.second << ','
      << (monotone ? 1 : 0) << ',' << max_backward_step << ',';
    if (index_defined) {
        s << index;
    } else {
        s << "nan";
    }
    s << ',' << gram_condition << ',' << (linearly_independent ? 1 : 0) << ',' << (admissible ? 1 : 0);
    return s.str();
}

}  // namespace aet
