#include "qmalab/torus.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace qmalab {

namespace {
std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
}
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

struct TorusGrid::Fft {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    size_t pts = 0;

    Fft(int rank, int N, size_t pts_) : pts(pts_) {
        in = fftw_alloc_complex(pts);
        out = fftw_alloc_complex(pts);
        std::vector<int> dims(static_cast<size_t>(rank), N);
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd = fftw_plan_dft(rank, dims.data(), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft(rank, dims.data(), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(in);
        fftw_free(out);
    }

    std::vector<std::complex<double>> forward(const std::vector<double>& v) {
        for (size_t i = 0; i < pts; ++i) {
            in[i][0] = v[i];
            in[i][1] = 0.0;
        }
        fftw_execute(fwd);
        std::vector<std::complex<double>> s(pts);
        std::memcpy(s.data(), out, pts * sizeof(fftw_complex));
        return s;
    }

    /// Inverse transform of a spectrum, returning the real part scaled by 1/pts.
    std::vector<double> backward_real(const std::vector<std::complex<double>>& s) {
        std::memcpy(in, s.data(), pts * sizeof(fftw_complex));
        fftw_execute(bwd);
        std::vector<double> v(pts);
        const double scale = 1.0 / double(pts);
        for (size_t i = 0; i < pts; ++i) v[i] = out[i][0] * scale;
        return v;
    }
};

TorusGrid::TorusGrid(int n, int N) : n_(n), N_(N), axes_(4 * n) {
    if (n < 1) throw std::invalid_argument("TorusGrid: n must be >= 1");
    if (N < 8 || N % 2 != 0) throw std::invalid_argument("TorusGrid: N must be even and >= 8");
    points_ = 1;
    for (int a = 0; a < axes_; ++a) {
        if (points_ > (size_t(1) << 40) / size_t(N))
            throw std::invalid_argument("TorusGrid: grid too large");
        points_ *= size_t(N);
    }
    fft_ = std::make_unique<Fft>(axes_, N_, points_);
}

TorusGrid::~TorusGrid() = default;

void TorusGrid::unflatten(size_t flat, int* idx) const {
    for (int a = axes_ - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % size_t(N_));
        flat /= size_t(N_);
    }
}

int TorusGrid::pair_index(int a, int b, int axes) {
    if (a > b) std::swap(a, b);
    return a * axes - a * (a - 1) / 2 + (b - a);
}

std::vector<std::vector<double>> TorusGrid::second_derivatives(
    const std::vector<double>& values) const {
    if (values.size() != points_) throw std::invalid_argument("second_derivatives: size mismatch");
    const auto spectrum = fft_->forward(values);

    // per-axis signed wavenumbers for every flat index, built once
    std::vector<std::vector<double>> freq(static_cast<size_t>(axes_));
    for (int a = 0; a < axes_; ++a) {
        freq[static_cast<size_t>(a)].resize(static_cast<size_t>(N_));
        for (int k = 0; k < N_; ++k)
            freq[static_cast<size_t>(a)][static_cast<size_t>(k)] = kTwoPi * wavenumber(k);
    }

    const int npairs = axes_ * (axes_ + 1) / 2;
    std::vector<std::vector<double>> out(static_cast<size_t>(npairs));
    std::vector<std::complex<double>> work(points_);
    std::vector<int> idx(static_cast<size_t>(axes_));
    for (int a = 0; a < axes_; ++a) {
        for (int b = a; b < axes_; ++b) {
            for (size_t f = 0; f < points_; ++f) {
                unflatten(f, idx.data());
                const double mult = -freq[static_cast<size_t>(a)][static_cast<size_t>(idx[a])] *
                                    freq[static_cast<size_t>(b)][static_cast<size_t>(idx[b])];
                work[f] = spectrum[f] * mult;
            }
            out[static_cast<size_t>(pair_index(a, b, axes_))] = fft_->backward_real(work);
        }
    }
    return out;
}

std::vector<double> TorusGrid::interpolate(const std::vector<double>& values,
                                           const Eigen::MatrixXd& pts) const {
    if (values.size() != points_) throw std::invalid_argument("interpolate: size mismatch");
    if (pts.cols() != axes_) throw std::invalid_argument("interpolate: point dimension mismatch");
    const auto spectrum = fft_->forward(values);

    // cull negligible modes; smooth fields have very few significant ones
    double amax = 0.0;
    for (const auto& c : spectrum) amax = std::max(amax, std::abs(c));
    const double cut = 1e-15 * amax;
    std::vector<size_t> modes;
    for (size_t f = 0; f < points_; ++f)
        if (std::abs(spectrum[f]) > cut) modes.push_back(f);

    std::vector<int> idx(static_cast<size_t>(axes_));
    std::vector<double> out(static_cast<size_t>(pts.rows()), 0.0);
    const double scale = 1.0 / double(points_);
    for (Eigen::Index p = 0; p < pts.rows(); ++p) {
        // per-axis complex exponential tables e^{2 pi i m x}, Nyquist as cosine
        std::vector<std::vector<std::complex<double>>> table(static_cast<size_t>(axes_));
        for (int a = 0; a < axes_; ++a) {
            auto& t = table[static_cast<size_t>(a)];
            t.resize(static_cast<size_t>(N_));
            const double x = pts(p, a);
            for (int k = 0; k < N_; ++k) {
                const int m = wavenumber(k);
                if (m == N_ / 2)
                    t[static_cast<size_t>(k)] = std::cos(kTwoPi * m * x);
                else
                    t[static_cast<size_t>(k)] = std::polar(1.0, kTwoPi * m * x);
            }
        }
        std::complex<double> acc = 0.0;
        for (size_t f : modes) {
            unflatten(f, idx.data());
            std::complex<double> e = spectrum[f];
            for (int a = 0; a < axes_; ++a)
                e *= table[static_cast<size_t>(a)][static_cast<size_t>(idx[a])];
            acc += e;
        }
        out[static_cast<size_t>(p)] = acc.real() * scale;
    }
    return out;
}

std::vector<double> TorusGrid::upsample(const std::vector<double>& values,
                                        const TorusGrid& fine) const {
    if (fine.n_ != n_ || fine.N_ < N_)
        throw std::invalid_argument("upsample: target grid incompatible");
    if (fine.N_ == N_) return values;
    const auto spectrum = fft_->forward(values);

    // map each coarse axis index to (fine index, weight); Nyquist splits in two
    struct Target {
        int idx;
        double w;
    };
    std::vector<std::vector<Target>> map(static_cast<size_t>(N_));
    for (int k = 0; k < N_; ++k) {
        const int m = wavenumber(k);
        if (m == N_ / 2) {
            map[static_cast<size_t>(k)] = {{N_ / 2, 0.5}, {fine.N_ - N_ / 2, 0.5}};
        } else {
            map[static_cast<size_t>(k)] = {{m >= 0 ? m : fine.N_ + m, 1.0}};
        }
    }

    std::vector<std::complex<double>> fine_spec(fine.points_, 0.0);
    std::vector<int> idx(static_cast<size_t>(axes_));
    std::vector<const Target*> pick(static_cast<size_t>(axes_));
    for (size_t f = 0; f < points_; ++f) {
        if (spectrum[f] == std::complex<double>(0.0, 0.0)) continue;
        unflatten(f, idx.data());
        // expand the per-axis target lists (at most 2^axes terms, usually 1)
        std::vector<int> choice(static_cast<size_t>(axes_), 0);
        while (true) {
            double w = 1.0;
            size_t flat = 0;
            for (int a = 0; a < axes_; ++a) {
                const Target& t =
                    map[static_cast<size_t>(idx[a])][static_cast<size_t>(choice[a])];
                w *= t.w;
                flat = flat * size_t(fine.N_) + size_t(t.idx);
            }
            fine_spec[flat] += spectrum[f] * w;
            int a = axes_ - 1;
            for (; a >= 0; --a) {
                if (choice[a] + 1 <
                    static_cast<int>(map[static_cast<size_t>(idx[a])].size())) {
                    ++choice[a];
                    break;
                }
                choice[a] = 0;
            }
            if (a < 0) break;
        }
    }
    const double ratio = double(fine.points_) / double(points_);
    for (auto& c : fine_spec) c *= ratio;
    return fine.fft_->backward_real(fine_spec);
}

std::vector<double> TorusGrid::poisson_solve(const std::vector<double>& rhs) const {
    if (rhs.size() != points_) throw std::invalid_argument("poisson_solve: size mismatch");
    auto spectrum = fft_->forward(rhs);
    std::vector<int> idx(static_cast<size_t>(axes_));
    for (size_t f = 0; f < points_; ++f) {
        if (f == 0) {
            spectrum[f] = 0.0;
            continue;
        }
        unflatten(f, idx.data());
        double k2 = 0.0;
        for (int a = 0; a < axes_; ++a) {
            const double w = kTwoPi * wavenumber(idx[a]);
            k2 += w * w;
        }
        spectrum[f] /= -k2;
    }
    return fft_->backward_real(spectrum);
}

ScalarField::ScalarField(const TorusGrid& g, std::vector<double> v)
    : grid(&g), values(std::move(v)) {
    if (values.size() != g.points()) throw std::invalid_argument("ScalarField: size mismatch");
}

double ScalarField::mean() const {
    return std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
}
double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }
double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}
double ScalarField::l1() const {
    double s = 0.0;
    for (double v : values) s += std::abs(v);
    return s / double(values.size());
}
void ScalarField::add_constant(double c) {
    for (double& v : values) v += c;
}

}  // namespace qmalab
