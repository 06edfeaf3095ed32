#pragma once

// Adaptive Gauss-Kronrod quadrature (G7/K15) with global error control,
// plus a tanh-sinh rule for integrands with algebraic endpoint behaviour.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace iwishart {

/// Thrown when the adaptive integrator exhausts its panel budget before
/// meeting the requested tolerance. Carries the best estimate obtained.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double best, double err)
        : std::runtime_error(what), best_estimate(best), error_estimate(err) {}

    double best_estimate;
    double error_estimate;
};

namespace detail {

// G7/K15 nodes and weights on [-1, 1]; column 0 abscissa, 1 Gauss weight,
// 2 Kronrod weight (Gauss weight zero on Kronrod-only nodes).
inline constexpr double kGk15[8][3] = {
    {0.000000000000000000, 0.417959183673469388, 0.209482141084727828},
    {0.405845151377397167, 0.381830050505118945, 0.190350578064785410},
    {0.741531185599394440, 0.279705391489276668, 0.140653259715525919},
    {0.949107912342758525, 0.129484966168869693, 0.063092092629978553},
    {0.207784955007898468, 0.0,                  0.204432940075298892},
    {0.586087235467691130, 0.0,                  0.169004726639267903},
    {0.864864423359769073, 0.0,                  0.104790010322250184},
    {0.991455371120812639, 0.0,                  0.022935322010529225},
};

template <typename F>
inline void gk15_panel(F&& f, double a, double b, double& value, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double g7 = kGk15[0][1] * f0;
    double k15 = kGk15[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kGk15[i][0];
        const double fi = f(mid + dx) + f(mid - dx);
        g7 += kGk15[i][1] * fi;
        k15 += kGk15[i][2] * fi;
    }
    g7 *= half;
    k15 *= half;
    value = k15;
    const double diff = std::fabs(k15 - g7);
    // standard QUADPACK-style sharpened estimate
    err = diff * std::sqrt(std::min(1.0, 200.0 * diff < 1.0 ? 200.0 * diff : 1.0));
    err = std::max(diff, std::numeric_limits<double>::epsilon() * std::fabs(k15));
}

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

template <typename F>
inline double integrate_finite(F&& f, double lo, double hi, double tol,
                               std::size_t max_panels) {
    std::priority_queue<Panel> queue;
    Panel p{lo, hi, 0.0, 0.0};
    gk15_panel(f, lo, hi, p.value, p.err);
    queue.push(p);
    double total = p.value;
    double total_err = p.err;
    std::size_t panels = 1;
    while (total_err > tol * std::max(std::fabs(total), 1e-300) &&
           total_err > 1e-305) {
        if (panels >= max_panels) {
            throw IntegrationError("integrate_adaptive: panel budget exhausted",
                                   total, total_err);
        }
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval cannot be split further; accept its contribution
            total_err -= worst.err;
            continue;
        }
        Panel left{worst.a, mid, 0.0, 0.0};
        Panel right{mid, worst.b, 0.0, 0.0};
        gk15_panel(f, left.a, left.b, left.value, left.err);
        gk15_panel(f, right.a, right.b, right.value, right.err);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        queue.push(left);
        queue.push(right);
        ++panels;
    }
    return total;
}

}  // namespace detail

/// Integrates f over (lo, hi) to relative tolerance tol. hi may be +infinity;
/// the tail is mapped onto a finite interval with the substitution x = 1/u.
/// Endpoints are never evaluated, so integrable endpoint singularities are
/// handled by subdivision. Throws IntegrationError when the panel budget runs
/// out, carrying the best estimate.
inline double integrate_adaptive(const std::function<double(double)>& f,
                                 double lo, double hi, double tol,
                                 std::size_t max_panels = 20000) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_adaptive: tol must be > 0");
    if (std::isinf(hi)) {
        auto mapped = [&f](double u) {
            const double x = 1.0 / u;
            const double v = f(x);
            return v == 0.0 ? 0.0 : v / (u * u);
        };
        if (lo > 0.0) {
            return detail::integrate_finite(mapped, 0.0, 1.0 / lo, tol, max_panels);
        }
        // split at 1 so the substitution applies to the tail only
        const double head = detail::integrate_finite(f, lo, 1.0, tol, max_panels);
        const double tail = detail::integrate_finite(mapped, 0.0, 1.0, tol, max_panels);
        return head + tail;
    }
    if (lo == hi) return 0.0;
    return detail::integrate_finite(f, lo, hi, tol, max_panels);
}

namespace detail {

/// Tanh-sinh quadrature of exp(log_f(u)) over u in (0, 1), where log_f is the
/// natural log of a positive integrand. The caller's log_f receives, besides
/// u, accurate values of log(u) and log(1-u) so that endpoint powers u^(p-1),
/// (1-u)^(q-1) lose no precision. Returns log of the integral; the scale
/// offset keeps results representable even when the integral under- or
/// overflows double range. rel_err_out reports the final doubling residual.
template <typename LogF>
inline double tanh_sinh_log(LogF&& log_f, double tol, double& rel_err_out) {
    // u(y) = sigmoid(2y), y = (pi/2) sinh(tau); log u and log(1-u) computed
    // stably on both sides.
    auto log_sigmoid = [](double v) {
        // log(1/(1+exp(-v)))
        if (v >= 0.0) return -std::log1p(std::exp(-v));
        return v - std::log1p(std::exp(v));
    };

    struct Node {
        double weight_log;  // log of dudtau weight
        double u, log_u, log_1mu;
    };
    auto make_node = [&](double tau) {
        const double y = 1.5707963267948966 * std::sinh(tau);
        Node nd;
        nd.log_u = log_sigmoid(2.0 * y);
        nd.log_1mu = log_sigmoid(-2.0 * y);
        nd.u = std::exp(nd.log_u);
        // du/dtau = (pi/4) cosh(tau) / cosh^2(y)
        const double log_cosh_y =
            std::fabs(y) + std::log1p(std::exp(-2.0 * std::fabs(y))) - 0.6931471805599453;
        nd.weight_log = std::log(0.7853981633974483 * std::cosh(tau)) - 2.0 * log_cosh_y;
        return nd;
    };

    const double tau_max = 4.0;
    double scale = -std::numeric_limits<double>::infinity();
    double sum = 0.0;  // sum of exp(contrib - scale)

    auto add_point = [&](double tau, double h) {
        const Node nd = make_node(tau);
        const double contrib = log_f(nd.u, nd.log_u, nd.log_1mu) + nd.weight_log;
        if (!std::isfinite(contrib)) return;  // underflowed integrand
        if (contrib > scale) {
            if (std::isfinite(scale)) sum *= std::exp(scale - contrib);
            scale = contrib;
            sum += 1.0;
        } else {
            sum += std::exp(contrib - scale);
        }
        (void)h;
    };

    // level 0: h = 1
    double h = 1.0;
    add_point(0.0, h);
    for (double tau = h; tau <= tau_max; tau += h) {
        add_point(tau, h);
        add_point(-tau, h);
    }
    double prev_log = scale + std::log(sum * h);
    rel_err_out = 1.0;
    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        for (double tau = h; tau <= tau_max; tau += 2.0 * h) {
            add_point(tau, h);
            add_point(-tau, h);
        }
        const double cur_log = scale + std::log(sum * h);
        const double diff = std::fabs(cur_log - prev_log);  // ~relative error
        prev_log = cur_log;
        rel_err_out = diff;
        if (level >= 3 && diff < tol) break;
    }
    return prev_log;
}

}  // namespace detail

}  // namespace iwishart
