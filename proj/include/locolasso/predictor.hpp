#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "locolasso/core.hpp"

namespace locolasso {

struct WeberOptions {
    double epsilon = 1e-8;
    std::size_t max_iter = 200;
    double tol = 1e-8;  // on iterate movement |w_{t+1} - w_t|
};

struct WeberResult {
    Vector w;
    std::size_t iterations = 0;
    std::vector<double> objective_trace;  // one value per iterate
};

/// sum_i r_i sqrt(|w - w_i|^2 + eps^2)
inline double weber_objective(const WeightMatrix& anchors, const Vector& links, const Vector& w,
                              double eps) {
    double total = 0.0;
    for (Index i = 0; i < anchors.rows(); ++i) {
        if (links(i) > 0.0) {
            total += links(i) * std::sqrt((anchors.row(i).transpose() - w).squaredNorm() + eps * eps);
        }
    }
    return total;
}

/// Reweighted averaging for min_w sum_i r_i |w - w_i|: the iterate is the
/// f-weighted mean of the anchors, then f_i = r_i / (2 s_i) with s_i the
/// smoothed distance to the new iterate.
inline WeberResult weber_fit(const WeightMatrix& anchors, const Vector& links,
                             const WeberOptions& opts = {}) {
    if (links.size() != anchors.rows()) {
        throw InputError(InputError::Kind::dimension_mismatch, "",
                         "link vector has " + std::to_string(links.size()) + " entries for " +
                             std::to_string(anchors.rows()) + " training samples");
    }
    if ((links.array() < 0.0).any() || !links.allFinite()) {
        throw InputError(InputError::Kind::invalid_value, "", "links must be finite and >= 0");
    }
    if (!(links.array() > 0.0).any()) {
        throw InputError(InputError::Kind::invalid_value, "",
                         "no positive links; use the unweighted average instead");
    }
    const double eps = opts.epsilon;
    WeberResult out;
    Vector f = links;
    Vector w = anchors.transpose() * f / f.sum();
    out.objective_trace.push_back(weber_objective(anchors, links, w, eps));
    for (std::size_t t = 0; t < opts.max_iter; ++t) {
        for (Index i = 0; i < anchors.rows(); ++i) {
            f(i) = links(i) > 0.0
                       ? links(i) / (2.0 * std::sqrt((anchors.row(i).transpose() - w).squaredNorm() +
                                                     eps * eps))
                       : 0.0;
        }
        Vector next = anchors.transpose() * f / f.sum();
        const double moved = (next - w).norm();
        w = std::move(next);
        out.objective_trace.push_back(weber_objective(anchors, links, w, eps));
        out.iterations = t + 1;
        if (moved < opts.tol) break;
    }
    out.w = std::move(w);
    return out;
}

inline Vector average_model(const WeightMatrix& W) { return W.colwise().mean().transpose(); }

/// Aligns a test vector with the model's feature layout. For a bias model
/// the vector may omit the trailing 1.
inline Vector model_input(const Vector& x, Index model_d, bool bias_augmented) {
    if (x.size() == model_d) return x;
    if (bias_augmented && x.size() + 1 == model_d) {
        Vector xb(model_d);
        xb.head(x.size()) = x;
        xb(model_d - 1) = 1.0;
        return xb;
    }
    throw InputError(InputError::Kind::dimension_mismatch, "",
                     "test vector has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(bias_augmented ? model_d - 1 : model_d));
}

/// Local model for a test point: Weber point of the linked training models,
/// or their plain average without links.
inline Vector interpolate_model(const WeightMatrix& W_hat, const std::optional<Vector>& links,
                                const WeberOptions& opts = {}) {
    if (links) return weber_fit(W_hat, *links, opts).w;
    return average_model(W_hat);
}

inline double predict(const WeightMatrix& W_hat, bool bias_augmented, const Vector& x,
                      const std::optional<Vector>& links = std::nullopt,
                      const WeberOptions& opts = {}) {
    const Vector xm = model_input(x, W_hat.cols(), bias_augmented);
    return interpolate_model(W_hat, links, opts).dot(xm);
}

}  // namespace locolasso
