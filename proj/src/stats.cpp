#include "subq/stats.hpp"

#include "subq/errors.hpp"

namespace subq {

EstimateWithError mean_with_error(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw TooFewSamples("need at least two samples for a standard error");
    CompensatedSum sum;
    for (double s : samples) sum.add(s);
    const double mean = sum.value() / double(n);
    CompensatedSum sq;
    for (double s : samples) sq.add((s - mean) * (s - mean));
    const double var = sq.value() / double(n - 1);
    return {mean, std::sqrt(var / double(n)), n};
}

double ols_slope(const Eigen::Ref<const Eigen::VectorXd>& t,
                 const Eigen::Ref<const Eigen::VectorXd>& y) {
    const Eigen::Index n = t.size();
    if (n < 2) throw TooFewSamples("slope fit needs two points");
    const double t_mean = t.mean();
    const double y_mean = y.mean();
    const Eigen::ArrayXd dt = t.array() - t_mean;
    return (dt * (y.array() - y_mean)).sum() / dt.square().sum();
}

}  // namespace subq
