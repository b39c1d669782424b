#include "npmr/solver.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "npmr/errors.hpp"

namespace npmr {

void SolverConfig::validate() const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and nonnegative");
    if (!(step_floor > 0.0)) throw InvalidArgument("step_floor must be positive");
    if (!(step_init > step_floor)) throw InvalidArgument("step_init must exceed step_floor");
    if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be positive");
}

namespace {

// The nonsmooth (or closed-form) part of a composite objective.
class Penalty {
public:
    Penalty(PenaltyKind kind, double lambda, const PenaltyGroups* groups, Index p)
        : kind_(kind), lambda_(lambda), groups_(groups)
    {
        if (groups_) groups_->validate(p);
        if (kind_ == PenaltyKind::frobenius_squared) {
            penalized_.assign(static_cast<std::size_t>(p), 1);
            if (groups_) {
                for (Index r : groups_->unpenalized) penalized_[static_cast<std::size_t>(r)] = 0;
            }
        }
    }

    double value(const Matrix& B) const
    {
        if (lambda_ == 0.0) return 0.0;
        switch (kind_) {
        case PenaltyKind::nuclear:
            return lambda_ * (groups_ ? grouped_nuclear_norm(B, *groups_) : nuclear_norm(B));
        case PenaltyKind::frobenius_squared: return lambda_ * penalized_squared_norm(B);
        case PenaltyKind::none: return 0.0;
        }
        return 0.0;
    }

    // argmin_Z 1/(2s) ||Z - M||^2 + penalty(Z), with penalty(Z).
    std::pair<Matrix, double> prox(const Matrix& M, double s) const
    {
        if (lambda_ == 0.0 || kind_ == PenaltyKind::none) return {M, 0.0};
        if (kind_ == PenaltyKind::nuclear) {
            SvtResult r = groups_ ? grouped_svt_with_norm(M, *groups_, s * lambda_) : svt_with_norm(M, s * lambda_);
            return {std::move(r.Z), lambda_ * r.nuclear_norm};
        }
        Matrix Z = M;
        const double shrink = 1.0 / (1.0 + 2.0 * s * lambda_);
        for (Index r = 0; r < Z.rows(); ++r) {
            if (penalized_[static_cast<std::size_t>(r)]) Z.row(r) *= shrink;
        }
        double v = lambda_ * penalized_squared_norm(Z);
        return {std::move(Z), v};
    }

private:
    double penalized_squared_norm(const Matrix& B) const
    {
        double total = 0.0;
        for (Index r = 0; r < B.rows(); ++r) {
            if (penalized_[static_cast<std::size_t>(r)]) total += B.row(r).squaredNorm();
        }
        return total;
    }

    PenaltyKind kind_;
    double lambda_;
    const PenaltyGroups* groups_;
    std::vector<char> penalized_;
};

const PenaltyGroups* groups_of(const SolverConfig& config)
{
    return config.groups ? &*config.groups : nullptr;
}

std::pair<ModelFit, FitTrace> run_proximal(const Dataset& data, const SolverConfig& config, PenaltyKind kind,
                                           const WarmStart* warm)
{
    config.validate();
    data.validate();
    const Index p = data.p();
    const int K = data.K;
    const PenaltyGroups* groups = groups_of(config);
    Penalty penalty(kind, config.lambda, groups, p);

    Vector alpha = Vector::Zero(K);
    Matrix B = Matrix::Zero(p, K);
    double s = config.step_init;
    if (warm) {
        if (warm->alpha.size() != K || warm->B.rows() != p || warm->B.cols() != K) {
            throw InvalidArgument("warm start has the wrong shape");
        }
        alpha = warm->alpha;
        B = warm->B;
        if (warm->step > config.step_floor) s = std::min(warm->step, config.step_init);
    }

    PointEvaluation current = evaluate_point(alpha, B, data);
    double obj = current.nll + penalty.value(B);
    if (!std::isfinite(obj)) throw NumericError("objective is not finite at the starting point");

    FitTrace trace;
    trace.objectives.push_back(obj);
    Matrix B_prev = B;
    int momentum = 0;
    const double noise_floor = config.rel_tol * 1e-3;

    while (trace.iterations < config.max_iter) {
        Matrix residual = current.probs;
        subtract_indicator(residual, data.y);
        Vector alpha_next = alpha - s * residual.colwise().sum().transpose();

        Matrix base;
        Matrix grad_B;
        if (config.accelerate) {
            // Extrapolate, then refresh probabilities at (alpha_next, A).
            double w = static_cast<double>(momentum) / (momentum + 3.0);
            base = momentum > 0 ? Matrix(B + w * (B - B_prev)) : B;
            Matrix at_base = evaluate_point(alpha_next, base, data).probs;
            subtract_indicator(at_base, data.y);
            grad_B = data.X.transpose_times(at_base);
        } else {
            base = B;
            grad_B = data.X.transpose_times(residual);
        }

        auto [B_next, pen_next] = penalty.prox(base - s * grad_B, s);
        PointEvaluation next = evaluate_point(alpha_next, B_next, data);
        double obj_next = next.nll + pen_next;

        if (!(obj_next <= obj)) {
            if (config.accelerate && momentum > 0) {
                momentum = 0;
                B_prev = B;
                ++trace.restarts;
                continue;
            }
            if (std::isfinite(obj_next) && obj_next - obj <= noise_floor * (1.0 + std::abs(obj))) {
                trace.converged = true;
                break;
            }
            s *= 0.5;
            ++trace.halvings;
            momentum = 0;
            B_prev = B;
            if (s < config.step_floor) {
                throw NumericError("step collapse: step size fell below " + std::to_string(config.step_floor) +
                                       " without an accepted step",
                                   static_cast<std::size_t>(trace.iterations));
            }
            continue;
        }

        B_prev = std::move(B);
        B = std::move(B_next);
        alpha = std::move(alpha_next);
        current = std::move(next);
        double change = obj - obj_next;
        obj = obj_next;
        ++momentum;
        ++trace.iterations;
        trace.objectives.push_back(obj);
        trace.step_sizes.push_back(s);
        if (change <= config.rel_tol * (1.0 + std::abs(obj))) {
            trace.converged = true;
            break;
        }
    }

    const PenaltyGroups* normalize_groups = kind == PenaltyKind::none ? nullptr : groups;
    normalize_fit(alpha, B, normalize_groups);

    ModelFit fit;
    fit.alpha = std::move(alpha);
    fit.B = std::move(B);
    fit.objective_trace = trace.objectives;
    fit.lambda = config.lambda;
    fit.penalty_kind = kind;
    fit.group_ranks = group_ranks(fit.B, normalize_groups);
    fit.final_rank = std::accumulate(fit.group_ranks.begin(), fit.group_ranks.end(), 0);
    return {std::move(fit), std::move(trace)};
}

} // namespace

double objective(const Vector& alpha, const Matrix& B, const Dataset& data, double lambda,
                 const PenaltyGroups* groups)
{
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
    double nll = negative_log_likelihood(alpha, B, data);
    if (lambda == 0.0) return nll;
    return nll + Penalty(PenaltyKind::nuclear, lambda, groups, B.rows()).value(B);
}

double ridge_objective(const Vector& alpha, const Matrix& B, const Dataset& data, double lambda,
                       const PenaltyGroups* groups)
{
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
    double nll = negative_log_likelihood(alpha, B, data);
    return nll + Penalty(PenaltyKind::frobenius_squared, lambda, groups, B.rows()).value(B);
}

std::pair<Vector, Matrix> pgd_step(const Vector& alpha, const Matrix& B, const Dataset& data, double s,
                                   double lambda, const PenaltyGroups* groups)
{
    if (!(s > 0.0)) throw InvalidArgument("pgd_step: step size must be positive");
    Gradient g = gradient(alpha, B, data);
    Vector alpha_next = alpha - s * g.alpha;
    Matrix moved = B - s * g.B;
    Matrix B_next = groups ? grouped_svt(moved, *groups, s * lambda) : svt(moved, s * lambda);
    return {std::move(alpha_next), std::move(B_next)};
}

std::pair<ModelFit, FitTrace> fit_npmr(const Dataset& data, const SolverConfig& config, const WarmStart* warm)
{
    return run_proximal(data, config, PenaltyKind::nuclear, warm);
}

std::pair<ModelFit, FitTrace> fit_ridge(const Dataset& data, const SolverConfig& config, const WarmStart* warm)
{
    return run_proximal(data, config, PenaltyKind::frobenius_squared, warm);
}

std::pair<ModelFit, FitTrace> fit_unpenalized(const Dataset& data, const SolverConfig& config,
                                              const WarmStart* warm)
{
    return run_proximal(data, config, PenaltyKind::none, warm);
}

ModelFit fit_null(const Dataset& data)
{
    data.validate();
    auto counts = data.class_counts();
    Vector alpha(data.K);
    for (int k = 0; k < data.K; ++k) {
        if (counts[static_cast<std::size_t>(k)] == 0) {
            throw InvalidArgument("class '" + data.class_names[static_cast<std::size_t>(k)] +
                                  "' is never observed; the null model is undefined");
        }
        alpha(k) = std::log(static_cast<double>(counts[static_cast<std::size_t>(k)]) / static_cast<double>(data.n()));
    }
    alpha.array() -= alpha.mean();

    ModelFit fit;
    fit.alpha = std::move(alpha);
    fit.B = Matrix::Zero(data.p(), data.K);
    fit.objective_trace = {negative_log_likelihood(fit.alpha, fit.B, data)};
    fit.penalty_kind = PenaltyKind::none;
    fit.group_ranks = {0};
    return fit;
}

void normalize_fit(Vector& alpha, Matrix& B, const PenaltyGroups* groups)
{
    if (alpha.size() > 0) alpha.array() -= alpha.mean();
    if (!groups) {
        B = center_rows(B);
        return;
    }
    for (const auto& g : groups->groups) scatter_rows(B, g, center_rows(gather_rows(B, g)));
}

std::vector<int> group_ranks(const Matrix& B, const PenaltyGroups* groups)
{
    if (!groups) return {numerical_rank(thin_svd(B).sigma)};
    std::vector<int> ranks;
    for (const auto& g : groups->groups) ranks.push_back(numerical_rank(thin_svd(gather_rows(B, g)).sigma));
    return ranks;
}

} // namespace npmr
