#include "aet/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aet {

namespace {

bool in_disk(double x1, double x2, double cx, double cy, double r) {
    const double dx = x1 - cx;
    const double dy = x2 - cy;
    return dx * dx + dy * dy <= r * r;
}

double bump(double r2, double denominator) {
    const double s = 1.0 - r2 / denominator;
    if (s <= 0.0) return 0.0;
    return std::exp(2.0 - 2.0 / s);
}

}  // namespace

double sigma1(double x1, double x2) {
    if (in_disk(x1, x2, -0.5, 0.0, 0.3) || in_disk(x1, x2, 0.0, -0.5, 0.1) || in_disk(x1, x2, 0.5, 0.5, 0.1)) {
        return 2.0;
    }
    return 1.0;
}

double sigma2(double x1, double x2) {
    const double r2 = x1 * x1 + x2 * x2;
    if (r2 >= 0.64) return 1.0;
    return 1.0 + bump(r2, 0.64);
}

double sigma2_alt(double x1, double x2) {
    const double r2 = x1 * x1 + x2 * x2;
    if (r2 > 0.64) return 1.0;
    const double s = 1.0 - r2 / (1.0 - 0.64);
    return 1.0 + std::exp(2.0 - 2.0 / s);
}

Phantom make_phantom(PhantomId id, double constant_value) {
    switch (id) {
        case PhantomId::sigma1:
            return {id, sigma1, 0.5, "sigma1"};
        case PhantomId::sigma2:
            return {id, sigma2, 0.5, "sigma2"};
        case PhantomId::sigma2_alt:
            return {id, sigma2_alt, 0.5, "sigma2-alt"};
        case PhantomId::constant: {
            if (!(constant_value > 0.0)) throw std::invalid_argument("constant phantom must be positive");
            const double lambda = std::min(0.5, 0.5 * constant_value);
            const std::string name = constant_value == 1.0 ? "unit" : "const:" + std::to_string(constant_value);
            return {id, [constant_value](double, double) { return constant_value; }, lambda, name};
        }
    }
    throw std::invalid_argument("unknown phantom id");
}

Phantom phantom_from_name(const std::string& name) {
    if (name == "sigma1") return make_phantom(PhantomId::sigma1);
    if (name == "sigma2") return make_phantom(PhantomId::sigma2);
    if (name == "sigma2-alt") return make_phantom(PhantomId::sigma2_alt);
    if (name == "unit") return make_phantom(PhantomId::constant, 1.0);
    if (name.rfind("const:", 0) == 0) return make_phantom(PhantomId::constant, std::stod(name.substr(6)));
    throw std::invalid_argument("unknown phantom '" + name + "' (expected sigma1, sigma2, unit or const:<value>)");
}

NodalScalarField sample_to_mesh(const Phantom& phantom, MeshPtr mesh) {
    return NodalScalarField::sample(std::move(mesh), [&](const Vec2& p) { return phantom(p); });
}

}  // namespace aet
