#include "fca/instance.hpp"

#include <sstream>

#include "fca/error.hpp"

namespace fca {

LlsInstance::LlsInstance(Matrix a, Vector b, std::optional<Vector> truth)
    : a_(std::move(a)), b_(std::move(b)), truth_(std::move(truth)) {
    if (b_.size() != a_.rows()) {
        throw DimensionError("LlsInstance: b has size " + std::to_string(b_.size()) +
                             " but A has " + std::to_string(a_.rows()) + " rows");
    }
    if (truth_ && truth_->size() != a_.cols()) {
        throw DimensionError("LlsInstance: truth has the wrong dimension");
    }
    if (!all_finite(a_) || !all_finite(b_)) {
        throw PreconditionError("LlsInstance: A and b must be finite");
    }
    svd_ = svd(a_);
    proj_ = subspace_projectors(svd_);
    pinv_ = fca::pseudoinverse(svd_);
    x_ls_ = pinv_ * b_;
    b_range_ = proj_.range * b_;
    b_null_ = proj_.left_null * b_;

    const double normal_residual = norm2(transpose_times(a_, a_ * x_ls_ - b_));
    const double bound = 1e-9 * (1.0 + frobenius_norm(a_) * norm2(b_));
    if (normal_residual > bound) {
        std::ostringstream os;
        os << "LlsInstance: minimal-norm solution fails the normal equations (residual "
           << normal_residual << ", bound " << bound << ')';
        throw ConvergenceError(os.str());
    }
}

double LlsInstance::lss_residual(const Vector& x) const {
    return norm2(a_ * x - b_range_);
}

}  // namespace fca
