#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>

namespace subq {

/// Neumaier-compensated running sum. Results depend only on the order of
/// the added terms, which callers keep fixed (trajectory index order).
class CompensatedSum {
public:
    void add(double value) {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            comp_ += (sum_ - t) + value;
        else
            comp_ += (value - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_{0};
    double comp_{0};
};

struct EstimateWithError {
    double value{0};
    double std_error{0};  ///< standard error of the mean
    std::size_t n_samples{0};
};

/// Sample mean and its standard error (unbiased sample variance / n).
EstimateWithError mean_with_error(std::span<const double> samples);

template <typename Derived>
EstimateWithError mean_with_error(const Eigen::DenseBase<Derived>& samples) {
    const Eigen::ArrayXd flat = samples.derived().array().reshaped();
    return mean_with_error(std::span<const double>(flat.data(), std::size_t(flat.size())));
}

/// Least-squares slope of y against t.
double ols_slope(const Eigen::Ref<const Eigen::VectorXd>& t,
                 const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace subq
