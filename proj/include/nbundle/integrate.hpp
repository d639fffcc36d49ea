// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) for complex-valued
// vector or matrix ODEs. The RHS is evaluated exactly at each stage time.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace nbundle {

// Defaults keep the density-matrix eigenvalue floor above -1e-8 over 1e4 time
// units; rel = 1e-8 was measured to drift to about -2e-8.
struct IntegratorSettings {
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double max_step = 18.0;  // sigma/10 for the default pulse width
    double initial_step = 1e-3;
};

// Stepper owning the current (t, y) pair; advance_to() clamps the final step
// so states are emitted exactly at requested times while the adaptive step
// size carries over between calls.
template <class State>
class Rk45Stepper {
  public:
    using Rhs = std::function<void(double, const State&, State&)>;
    using StepObserver = std::function<void(double, double, const State&)>;

    Rk45Stepper(Rhs rhs, State y0, double t0, IntegratorSettings settings)
        : rhs_(std::move(rhs)),
          y_(std::move(y0)),
          t_(t0),
          s_(settings),
          h_(std::min(settings.initial_step, settings.max_step)) {
        k1_ = k2_ = k3_ = k4_ = k5_ = k6_ = k7_ = ytmp_ = ynew_ = y_;
        rhs_(t_, y_, k1_);
        fsal_valid_ = true;
    }

    double time() const { return t_; }
    const State& state() const { return y_; }
    State& state() { return y_; }

    // Scale the state in place (invariant projection for linear right-hand
    // sides: f(c y) = c f(y), so the cached derivative stays consistent).
    void rescale(double c) {
        y_ *= c;
        if (fsal_valid_) k1_ *= c;
    }

    // Replace the state in place (after a quantum jump); invalidates FSAL.
    void reset_state(const State& y, double t) {
        y_ = y;
        t_ = t;
        fsal_valid_ = false;
    }

    // Performs exactly one accepted step, clamped so t never exceeds t_max.
    // Returns the new time.
    double step_once(double t_max) {
        if (t_max <= t_) return t_;
        int rejects = 0;
        for (;;) {
            double h = std::min({h_, s_.max_step, t_max - t_});
            if (h < 1e-14 * std::max(1.0, std::abs(t_)))
                throw std::runtime_error("rk45: step-size underflow (stiffness signal)");
            if (!fsal_valid_) {
                rhs_(t_, y_, k1_);
                fsal_valid_ = true;
            }
            const double err_norm = try_step(h);
            if (err_norm <= 1.0) {
                t_ += h;
                y_.swap(ynew_);
                k1_.swap(k7_);
                const double fac = err_norm > 0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
                h_ = h * std::clamp(fac, 0.2, 5.0);
                return t_;
            }
            h_ = h * std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 0.9);
            if (++rejects > 200)
                throw std::runtime_error("rk45: repeated step rejection");
        }
    }

    void advance_to(double t_end, const StepObserver& on_step = nullptr) {
        while (t_ < t_end) {
            const double t_prev = t_;
            step_once(t_end);
            if (on_step) on_step(t_prev, t_, y_);
        }
    }

  private:
    // One trial step of size h; fills ynew_/k7_ and returns the scaled error norm.
    double try_step(double h) {
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                         a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                         a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                         b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                         e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        ytmp_ = y_ + h * a21 * k1_;
        rhs_(t_ + c2 * h, ytmp_, k2_);
        ytmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
        rhs_(t_ + c3 * h, ytmp_, k3_);
        ytmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
        rhs_(t_ + c4 * h, ytmp_, k4_);
        ytmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
        rhs_(t_ + c5 * h, ytmp_, k5_);
        ytmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
        rhs_(t_ + h, ytmp_, k6_);
        ynew_ = y_ + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
        rhs_(t_ + h, ynew_, k7_);

        ytmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
        const auto scale =
            (s_.abs_tol + s_.rel_tol * y_.cwiseAbs().cwiseMax(ynew_.cwiseAbs()).array())
                .eval();
        return (ytmp_.cwiseAbs().array() / scale).maxCoeff();
    }

    Rhs rhs_;
    State y_;
    double t_;
    IntegratorSettings s_;
    double h_;
    bool fsal_valid_ = false;
    State k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_;
};

// One-shot convenience wrapper.
template <class State, class RHS>
void rk45_integrate(RHS&& rhs, State& y, double& t, double t_end,
                    const IntegratorSettings& s) {
    Rk45Stepper<State> stepper(std::forward<RHS>(rhs), y, t, s);
    stepper.advance_to(t_end);
    y = stepper.state();
    t = stepper.time();
}

}  // namespace nbundle
