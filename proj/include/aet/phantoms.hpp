#pragma once

#include <functional>
#include <string>

#include "aet/field.hpp"

namespace aet {

enum class PhantomId { sigma1, sigma2, sigma2_alt, constant };

/// Ground-truth isotropic conductivity on the unit disk.
struct Phantom {
    PhantomId id = PhantomId::sigma1;
    std::function<double(double, double)> evaluator;
    /// Ellipticity bound lambda <= sigma.
    double lambda_bound = 0.5;
    std::string name;

    double operator()(double x1, double x2) const { return evaluator(x1, x2); }
    double operator()(const Vec2& p) const { return evaluator(p.x, p.y); }
};

/// 2 inside three disks ((-1/2,0) r=0.3, (0,-1/2) r=0.1, (1/2,1/2) r=0.1), 1 elsewhere.
double sigma1(double x1, double x2);

/// Smooth bump 1 + exp(2 - 2 / (1 - r^2 / 0.8^2)) for r < 0.8, 1 elsewhere.
double sigma2(double x1, double x2);

/// Bump variant with inner denominator 1 - 0.8^2 = 0.36 instead of 0.8^2; singular
/// at r = 0.6 and unbounded there. Kept for comparison runs only.
double sigma2_alt(double x1, double x2);

Phantom make_phantom(PhantomId id, double constant_value = 1.0);

/// Accepts "sigma1", "sigma2", "sigma2-alt", "unit" and "const:<value>".
Phantom phantom_from_name(const std::string& name);

NodalScalarField sample_to_mesh(const Phantom& phantom, MeshPtr mesh);

}  // namespace aet
