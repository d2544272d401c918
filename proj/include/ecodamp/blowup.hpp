#pragma once

// Finite-time blow-up detection and the shared step-size controller.
// Blow-up is declared when the sup-norm of r crosses the threshold, or when
// the controller's step size collapses below dt_min while the norm is still
// growing. The blow-up time is refined by extrapolating 1/||r||_inf to zero
// over the last few accepted steps, which is linear for r' ~ c r^2.

#include <deque>

#include "ecodamp/common.hpp"

namespace ecodamp {

struct ControllerConfig {
    double threshold = 1e6;       // sup-norm blow-up level
    double dt_min = 1e-8;
    double growth_factor = 10.0;  // per-step sup-norm growth that triggers rejection
    bool adaptive = true;         // fixed-dt runs disable the ladder
    int grow_every = 20;          // accepted steps between dt increases
    double grow_ratio = 1.2;      // capped at the initial dt
};

struct BlowupReport {
    bool blew_up = false;
    double t_star = 0.0;              // estimated blow-up time (when blew_up)
    double horizon = 0.0;
    double terminal_sup_norm = 0.0;   // sup |r| at the last accepted state
    double terminal_population = 0.0; // integral of r at the last accepted state
    long rejection_count = 0;
    long clamp_count = 0;             // negative-state clamps seen by the kinetics
};

class StepController {
public:
    StepController(double dt_initial, const ControllerConfig& cfg) : cfg_(cfg), dt0_(dt_initial), dt_(dt_initial) {
        require(dt_initial > 0.0, "StepController: dt must be positive");
    }

    double dt() const { return dt_; }
    long rejections() const { return rejections_; }
    const ControllerConfig& config() const { return cfg_; }

    // Returns false once dt has fallen below dt_min.
    bool reject() {
        ++rejections_;
        if (!cfg_.adaptive) return false;
        dt_ *= 0.5;
        streak_ = 0;
        return dt_ >= cfg_.dt_min;
    }

    void accept() {
        if (!cfg_.adaptive) return;
        if (++streak_ >= cfg_.grow_every) {
            streak_ = 0;
            dt_ = std::min(dt_ * cfg_.grow_ratio, dt0_);
        }
    }

    // Resume support: restores the exact ladder state of a checkpointed run.
    void restore(double dt, int streak, long rejections) {
        dt_ = dt;
        streak_ = streak;
        rejections_ = rejections;
    }
    int streak() const { return streak_; }

private:
    ControllerConfig cfg_;
    double dt0_, dt_;
    int streak_ = 0;
    long rejections_ = 0;
};

class BlowupDetector {
public:
    explicit BlowupDetector(double threshold) : threshold_(threshold) {}

    void push(double t, double sup_norm) {
        growing_ = !window_.empty() && sup_norm > window_.back().second;
        window_.emplace_back(t, sup_norm);
        if (window_.size() > 5) window_.pop_front();
    }

    bool threshold_crossed() const { return !window_.empty() && window_.back().second >= threshold_; }
    bool norm_growing() const { return growing_; }
    double threshold() const { return threshold_; }

    // Least-squares line through (t, 1/sup) of the stored window; its root is
    // the blow-up time estimate. Falls back to the last accepted time.
    double extrapolate_t_star() const {
        if (window_.empty()) return 0.0;
        const double t_last = window_.back().first;
        if (window_.size() < 2) return t_last;
        double st = 0, sy = 0, stt = 0, sty = 0;
        for (auto [t, s] : window_) {
            double y = 1.0 / s;
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
        const double n = static_cast<double>(window_.size());
        const double denom = n * stt - st * st;
        if (denom == 0.0) return t_last;
        const double slope = (n * sty - st * sy) / denom;
        if (slope >= 0.0) return t_last;
        const double intercept = (sy - slope * st) / n;
        return std::max(-intercept / slope, t_last);
    }

    const std::deque<std::pair<double, double>>& window() const { return window_; }

    void restore(const std::vector<std::pair<double, double>>& w) {
        window_.assign(w.begin(), w.end());
        growing_ = window_.size() >= 2 && window_.back().second > window_[window_.size() - 2].second;
    }

private:
    double threshold_;
    bool growing_ = false;
    std::deque<std::pair<double, double>> window_;
};

// Stream form: classify a recorded (t, sup-norm) series against a threshold.
inline BlowupReport detect_blowup(const std::vector<double>& times, const std::vector<double>& sup_norms,
                                  double threshold, double horizon) {
    require(times.size() == sup_norms.size() && !times.empty(), "detect_blowup: need a nonempty series");
    BlowupDetector det(threshold);
    BlowupReport rep;
    rep.horizon = horizon;
    for (std::size_t i = 0; i < times.size(); ++i) {
        det.push(times[i], sup_norms[i]);
        rep.terminal_sup_norm = sup_norms[i];
        if (det.threshold_crossed()) {
            rep.blew_up = true;
            rep.t_star = std::min(det.extrapolate_t_star(), horizon);
            return rep;
        }
    }
    return rep;
}

}  // namespace ecodamp
