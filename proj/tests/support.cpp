#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include <unistd.h>

namespace npmr::testing {

Matrix random_matrix(Index rows, Index cols, Rng& rng, double scale)
{
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) M(i, j) = scale * rng.normal();
    }
    return M;
}

Dataset random_dataset(int n, int p, int K, Rng& rng, double scale)
{
    Matrix X = random_matrix(n, p, rng, scale);
    std::vector<int> y(static_cast<std::size_t>(n));
    std::uniform_int_distribution<int> pick(1, K);
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = i < K ? i + 1 : pick(rng.engine());
    std::shuffle(y.begin(), y.end(), rng.engine());
    return make_dataset(DesignMatrix(std::move(X)), std::move(y), K);
}

Dataset dataset_from_truth(const Matrix& X, const Vector& alpha, const Matrix& B, Rng& rng)
{
    const auto K = static_cast<int>(B.cols());
    std::vector<int> y;
    for (Index i = 0; i < X.rows(); ++i) {
        Vector eta = alpha + B.transpose() * X.row(i).transpose();
        Vector w = (eta.array() - eta.maxCoeff()).exp();
        std::discrete_distribution<int> draw(w.data(), w.data() + w.size());
        y.push_back(draw(rng.engine()) + 1);
    }
    return make_dataset(DesignMatrix(X), std::move(y), K);
}

double naive_nll(const Vector& alpha, const Matrix& B, const Matrix& X, const std::vector<int>& y)
{
    double total = 0.0;
    for (Index i = 0; i < X.rows(); ++i) {
        double denom = 0.0;
        double picked = 0.0;
        for (Index k = 0; k < B.cols(); ++k) {
            double eta = alpha(k);
            for (Index j = 0; j < X.cols(); ++j) eta += X(i, j) * B(j, k);
            denom += std::exp(eta);
            if (k == y[static_cast<std::size_t>(i)] - 1) picked = eta;
        }
        total -= picked - std::log(denom);
    }
    return total;
}

Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h)
{
    Vector g(x.size());
    Vector probe = x;
    for (Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + h;
        double up = f(probe);
        probe(i) = x(i) - h;
        double down = f(probe);
        probe(i) = x(i);
        g(i) = (up - down) / (2.0 * h);
    }
    return g;
}

Vector gram_singular_values(const Matrix& M)
{
    Matrix gram = M.rows() >= M.cols() ? Matrix(M.transpose() * M) : Matrix(M * M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    Vector ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
    return ev;
}

double power_iteration_norm(const Matrix& M, int iterations)
{
    Vector v = Vector::Ones(M.cols()).normalized();
    double estimate = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Vector w = M.transpose() * (M * v);
        double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        estimate = std::sqrt(norm);
    }
    return estimate;
}

double newton_reference_nll(const Dataset& data)
{
    const Matrix X0 = data.X.to_dense();
    const Index n = X0.rows();
    const Index d = X0.cols() + 1;
    const int K = data.K;
    Matrix X(n, d);
    X.col(0).setOnes();
    X.rightCols(d - 1) = X0;
    const Index m = d * (K - 1);  // free parameters; class K pinned at zero

    auto nll = [&](const Vector& theta) {
        double total = 0.0;
        for (Index i = 0; i < n; ++i) {
            Vector eta = Vector::Zero(K);
            for (int k = 0; k < K - 1; ++k) eta(k) = X.row(i).dot(theta.segment(k * d, d));
            double mx = eta.maxCoeff();
            double lse = mx + std::log((eta.array() - mx).exp().sum());
            total += lse - eta(data.y[static_cast<std::size_t>(i)] - 1);
        }
        return total;
    };

    Vector theta = Vector::Zero(m);
    double current = nll(theta);
    for (int iter = 0; iter < 100; ++iter) {
        Vector g = Vector::Zero(m);
        Matrix H = Matrix::Zero(m, m);
        for (Index i = 0; i < n; ++i) {
            Vector eta = Vector::Zero(K);
            for (int k = 0; k < K - 1; ++k) eta(k) = X.row(i).dot(theta.segment(k * d, d));
            Vector p = (eta.array() - eta.maxCoeff()).exp();
            p /= p.sum();
            const Vector xi = X.row(i).transpose();
            for (int k = 0; k < K - 1; ++k) {
                double r = p(k) - (data.y[static_cast<std::size_t>(i)] == k + 1 ? 1.0 : 0.0);
                g.segment(k * d, d) += r * xi;
                for (int l = 0; l < K - 1; ++l) {
                    double w = (k == l ? p(k) : 0.0) - p(k) * p(l);
                    H.block(k * d, l * d, d, d) += w * xi * xi.transpose();
                }
            }
        }
        Vector step = H.ldlt().solve(g);
        double t = 1.0;
        double next = nll(theta - t * step);
        while (next > current && t > 1e-10) {
            t *= 0.5;
            next = nll(theta - t * step);
        }
        if (next > current) break;
        theta -= t * step;
        double change = current - next;
        current = next;
        if (change < 1e-14 * (1.0 + std::abs(current)) && g.norm() < 1e-9) break;
    }
    return current;
}

const std::vector<std::string>& pa_outcomes()
{
    static const std::vector<std::string> outcomes{"F", "G", "K", "BB", "HBP", "1B", "2B", "3B", "HR"};
    return outcomes;
}

std::string synthetic_events_csv(const EventTableSpec& spec)
{
    static const char* positions[] = {"C", "1B", "2B", "3B", "SS", "LF", "CF", "RF"};
    Rng rng(spec.seed);
    const auto& outcomes = pa_outcomes();
    const auto K = static_cast<Index>(outcomes.size());

    Vector base(K);
    base << 1.2, 1.1, 0.9, 0.2, -1.5, 0.6, -0.3, -2.0, -0.8;
    Vector v1 = random_matrix(K, 1, rng);
    Vector v2 = random_matrix(K, 1, rng);
    v1.array() -= v1.mean();
    v2.array() -= v2.mean();
    v1.normalize();
    v2.normalize();
    Vector batter_skill = random_matrix(spec.n_batters, 1, rng, spec.signal);
    Vector pitcher_skill = random_matrix(spec.n_pitchers, 1, rng, spec.signal);
    Vector home_effect = random_matrix(K, 1, rng, 0.1);

    auto zipf = [](int n) {
        std::vector<double> w;
        for (int i = 0; i < n; ++i) w.push_back(1.0 / std::pow(i + 1.0, 0.7));
        return std::discrete_distribution<int>(w.begin(), w.end());
    };
    auto pick_batter = zipf(spec.n_batters);
    auto pick_pitcher = zipf(spec.n_pitchers);
    std::uniform_int_distribution<int> pick_stadium(0, spec.n_stadiums - 1);
    std::bernoulli_distribution coin(0.5);

    std::ostringstream out;
    out << "batter_id,pitcher_id,stadium_id,home,opposite_hand,position,outcome\n";
    for (int i = 0; i < spec.n_events; ++i) {
        int b = pick_batter(rng.engine());
        int p = pick_pitcher(rng.engine());
        int s = pick_stadium(rng.engine());
        int home = coin(rng.engine());
        int opp = coin(rng.engine());
        Vector eta = base + batter_skill(b) * 3.0 * v1 + pitcher_skill(p) * 3.0 * v2 + home * home_effect;
        Vector w = (eta.array() - eta.maxCoeff()).exp();
        std::discrete_distribution<int> draw(w.data(), w.data() + w.size());
        int y = draw(rng.engine());
        out << "B" << 100 + b << ",P" << 100 + p << ",S" << s + 1 << ',' << home << ',' << opp << ','
            << positions[b % 8] << ',' << outcomes[static_cast<std::size_t>(y)] << '\n';
    }
    return out.str();
}

std::string events_schema_json(int batter_threshold_rank, int pitcher_threshold_rank)
{
    std::string list;
    for (const auto& o : pa_outcomes()) list += (list.empty() ? "\"" : ", \"") + o + "\"";
    return "{\"outcomes\": [" + list + "], \"batter_position\": \"position\", \"design\": {" +
           "\"batter_threshold_rank\": " + std::to_string(batter_threshold_rank) +
           ", \"pitcher_threshold_rank\": " + std::to_string(pitcher_threshold_rank) + "}}\n";
}

TempDir::TempDir()
{
    static std::atomic<int> counter{0};
    auto base = std::filesystem::temp_directory_path();
    for (;;) {
        path_ = base / ("npmr-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        if (std::filesystem::create_directory(path_)) break;
    }
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double rel_diff(const Matrix& a, const Matrix& b)
{
    return (a - b).norm() / std::max(1.0, b.norm());
}

} // namespace npmr::testing
