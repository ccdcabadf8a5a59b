#pragma once

#include <cmath>
#include <cstdint>

namespace roughpam {

// Streaming mean/variance (Welford), mergeable with Chan's formula so that a
// fixed batch order gives identical results for any thread count.
class RunningStats {
public:
    void add(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }

    void merge(const RunningStats& other) {
        if (other.count_ == 0) return;
        if (count_ == 0) {
            *this = other;
            return;
        }
        const double n1 = static_cast<double>(count_);
        const double n2 = static_cast<double>(other.count_);
        const double delta = other.mean_ - mean_;
        const double n = n1 + n2;
        mean_ += delta * n2 / n;
        m2_ += other.m2_ + delta * delta * n1 * n2 / n;
        count_ += other.count_;
    }

    std::int64_t count() const { return count_; }
    double mean() const { return mean_; }
    double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
    double std_error() const {
        return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
    }

private:
    std::int64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Streaming covariance of two quantities, used for paired comparisons.
class RunningCovariance {
public:
    void add(double x, double y) {
        ++count_;
        const double n = static_cast<double>(count_);
        const double dx = x - mean_x_;
        mean_x_ += dx / n;
        mean_y_ += (y - mean_y_) / n;
        c_ += dx * (y - mean_y_);
    }

    void merge(const RunningCovariance& other) {
        if (other.count_ == 0) return;
        if (count_ == 0) {
            *this = other;
            return;
        }
        const double n1 = static_cast<double>(count_);
        const double n2 = static_cast<double>(other.count_);
        const double n = n1 + n2;
        const double dx = other.mean_x_ - mean_x_;
        const double dy = other.mean_y_ - mean_y_;
        c_ += other.c_ + dx * dy * n1 * n2 / n;
        mean_x_ += dx * n2 / n;
        mean_y_ += dy * n2 / n;
        count_ += other.count_;
    }

    std::int64_t count() const { return count_; }
    double covariance() const { return count_ > 1 ? c_ / static_cast<double>(count_ - 1) : 0.0; }

private:
    std::int64_t count_ = 0;
    double mean_x_ = 0.0;
    double mean_y_ = 0.0;
    double c_ = 0.0;
};

}  // namespace roughpam
