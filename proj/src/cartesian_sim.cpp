#include "driftwave/cartesian_sim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace driftwave::cart {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Complex = std::complex<double>;
using Spectrum = Eigen::VectorXcd;

class Fft3 {
  public:
    Fft3(int nx, int ny, int nz) : n_(static_cast<std::size_t>(nx) * ny * nz) {
        buf_ = fftw_alloc_complex(n_);
        forward_ = fftw_plan_dft_3d(nx, ny, nz, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_3d(nx, ny, nz, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft3() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(buf_);
    }
    Fft3(const Fft3&) = delete;
    Fft3& operator=(const Fft3&) = delete;

    Spectrum forward(const Eigen::VectorXd& physical) const {
        for (std::size_t i = 0; i < n_; ++i) {
            buf_[i][0] = physical(static_cast<Eigen::Index>(i));
            buf_[i][1] = 0.0;
        }
        fftw_execute(forward_);
        Spectrum out(n_);
        for (std::size_t i = 0; i < n_; ++i)
            out(static_cast<Eigen::Index>(i)) = Complex(buf_[i][0], buf_[i][1]);
        return out;
    }

    // Unnormalized inverse; caller divides by N.
    void backward(const Spectrum& spectral, Eigen::VectorXd& real_part,
                  double* max_imag = nullptr) const {
        for (std::size_t i = 0; i < n_; ++i) {
            buf_[i][0] = spectral(static_cast<Eigen::Index>(i)).real();
            buf_[i][1] = spectral(static_cast<Eigen::Index>(i)).imag();
        }
        fftw_execute(backward_);
        real_part.resize(static_cast<Eigen::Index>(n_));
        double imag = 0.0;
        const double scale = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            real_part(static_cast<Eigen::Index>(i)) = buf_[i][0] * scale;
            imag = std::max(imag, std::abs(buf_[i][1]) * scale);
        }
        if (max_imag) *max_imag = std::max(*max_imag, imag);
    }

  private:
    std::size_t n_;
    fftw_complex* buf_;
    fftw_plan forward_, backward_;
};

struct ModeTable {
    int nx, ny, nz;
    std::size_t total;
    std::vector<double> kx, ky, kz;  // per index, Nyquist mapped to zero

    ModeTable(const CartesianGridSpec& g)
        : nx(g.nx), ny(g.ny), nz(g.nz), total(static_cast<std::size_t>(g.nx) * g.ny * g.nz) {
        auto fill = [](std::vector<double>& k, int n, double len) {
            k.resize(n);
            for (int i = 0; i < n; ++i) {
                int m = (i <= n / 2) ? i : i - n;
                if (n % 2 == 0 && i == n / 2) m = 0;  // odd-derivative Nyquist convention
                k[i] = 2.0 * kPi * m / len;
            }
        };
        fill(kx, g.nx, g.lx);
        fill(ky, g.ny, g.ly);
        fill(kz, g.nz, g.lz);
    }

    std::size_t index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * ny + iy) * nz + iz;
    }
    Eigen::Vector3d k_at(std::size_t idx) const {
        const int iz = static_cast<int>(idx % nz);
        const int iy = static_cast<int>((idx / nz) % ny);
        const int ix = static_cast<int>(idx / (static_cast<std::size_t>(ny) * nz));
        return {kx[ix], ky[iy], kz[iz]};
    }
};

Eigen::Matrix4d symbol(const Eigen::Vector3d& k, double v0) {
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    h(0, 0) = h(1, 1) = h(2, 2) = h(3, 3) = v0 * k.z();
    for (int j = 0; j < 3; ++j) {
        h(0, j + 1) = k(j);
        h(j + 1, 0) = k(j);
    }
    return h;
}

// physical central-difference helpers on the periodic box
struct Stencils {
    const ModeTable& modes;
    double hx, hy, hz;

    double d1(const Eigen::VectorXd& f, int ix, int iy, int iz, int axis) const {
        int up[3] = {ix, iy, iz}, down[3] = {ix, iy, iz};
        const int n[3] = {modes.nx, modes.ny, modes.nz};
        const double h[3] = {hx, hy, hz};
        up[axis] = (up[axis] + 1) % n[axis];
        down[axis] = (down[axis] + n[axis] - 1) % n[axis];
        return (f(modes.index(up[0], up[1], up[2])) - f(modes.index(down[0], down[1], down[2]))) /
               (2.0 * h[axis]);
    }
    double d2(const Eigen::VectorXd& f, int ix, int iy, int iz, int axis) const {
        int up[3] = {ix, iy, iz}, down[3] = {ix, iy, iz};
        const int n[3] = {modes.nx, modes.ny, modes.nz};
        const double h[3] = {hx, hy, hz};
        up[axis] = (up[axis] + 1) % n[axis];
        down[axis] = (down[axis] + n[axis] - 1) % n[axis];
        return (f(modes.index(up[0], up[1], up[2])) - 2.0 * f(modes.index(ix, iy, iz)) +
                f(modes.index(down[0], down[1], down[2]))) /
               (h[axis] * h[axis]);
    }
};

}  // namespace

Eigen::Vector4d analytic_symbol_frequencies(const Eigen::Vector3d& k, double v0) {
    const double base = v0 * k.z();
    const double kn = k.norm();
    return {base - kn, base, base, base + kn};
}

CartesianResult friedrichs_cartesian_simulate(const CartesianScenario& scenario) {
    const auto& g = scenario.grid;
    if (!(scenario.dt > 0.0) || scenario.t_final < scenario.dt)
        throw std::invalid_argument("friedrichs_cartesian_simulate: need 0 < dt <= t_final");
    const ModeTable modes(g);
    const std::size_t total = modes.total;
    const double volume = g.lx * g.ly * g.lz;
    const double cell_volume = volume / static_cast<double>(total);

    Fft3 fft(g.nx, g.ny, g.nz);

    // per-mode Cayley step and source responses
    std::vector<Eigen::Matrix4cd> step_matrix(total), source_matrix(total);
    for (std::size_t m = 0; m < total; ++m) {
        const Eigen::Matrix4cd x =
            Complex(0.0, scenario.dt / 2.0) * symbol(modes.k_at(m), scenario.v0);
        const Eigen::Matrix4cd plus = Eigen::Matrix4cd::Identity() + x;
        const Eigen::Matrix4cd inv = plus.inverse();
        step_matrix[m] = inv * (Eigen::Matrix4cd::Identity() - x);
        source_matrix[m] = inv;
    }

    // state spectra
    std::array<Spectrum, 4> u;
    for (auto& s : u) s = Spectrum::Zero(total);

    if (scenario.init == CartesianScenario::Init::random) {
        std::mt19937_64 rng(scenario.seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Eigen::VectorXd field(total);
        for (int c = 0; c < 4; ++c) {
            for (std::size_t i = 0; i < total; ++i)
                field(static_cast<Eigen::Index>(i)) = dist(rng);
            u[c] = fft.forward(field);
        }
    } else if (scenario.init == CartesianScenario::Init::mode) {
        const auto& m = scenario.init_mode;
        const int ix = ((m.x() % g.nx) + g.nx) % g.nx;
        const int iy = ((m.y() % g.ny) + g.ny) % g.ny;
        const int iz = ((m.z() % g.nz) + g.nz) % g.nz;
        const std::size_t plus = modes.index(ix, iy, iz);
        const std::size_t minus =
            modes.index((g.nx - ix) % g.nx, (g.ny - iy) % g.ny, (g.nz - iz) % g.nz);
        const Eigen::Matrix4d h = symbol(modes.k_at(plus), scenario.v0);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(h);
        Eigen::Vector4cd amp = Eigen::Vector4cd::Zero();
        for (int j = 0; j < 4; ++j)
            amp += Complex(1.0 + 0.25 * j, 0.35 - 0.1 * j) *
                   eig.eigenvectors().col(j).cast<Complex>();
        amp *= static_cast<double>(total);  // O(1) physical amplitude
        for (int c = 0; c < 4; ++c) {
            u[c](plus) = amp(c);
            if (minus != plus) u[c](minus) = std::conj(amp(c));
        }
    }

    // separable forcing: spatial spectrum times a time profile on the p row
    Spectrum force_hat;
    const bool has_force = static_cast<bool>(scenario.force_space);
    if (has_force) {
        Eigen::VectorXd field(total);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz)
                    field(static_cast<Eigen::Index>(modes.index(ix, iy, iz))) =
                        scenario.force_space(Eigen::Vector3d((ix + 0.0) * g.lx / g.nx,
                                                             (iy + 0.0) * g.ly / g.ny,
                                                             (iz + 0.0) * g.lz / g.nz));
        force_hat = fft.forward(field);
    }
    auto profile = [&](double t) {
        return scenario.force_time ? scenario.force_time(t) : 1.0;
    };

    const int steps = static_cast<int>(std::llround(scenario.t_final / scenario.dt));
    CartesianResult result;

    auto energy = [&]() {
        double sum = 0.0;
        for (const auto& s : u) sum += s.squaredNorm();
        return sum * cell_volume / static_cast<double>(total);
    };

    // monitored mode traces
    std::vector<std::size_t> monitor_idx;
    std::vector<std::vector<Eigen::Vector4cd>> traces(scenario.monitor_modes.size());
    for (const auto& m : scenario.monitor_modes) {
        const int ix = ((m.x() % g.nx) + g.nx) % g.nx;
        const int iy = ((m.y() % g.ny) + g.ny) % g.ny;
        const int iz = ((m.z() % g.nz) + g.nz) % g.nz;
        monitor_idx.push_back(modes.index(ix, iy, iz));
    }
    auto record_traces = [&]() {
        for (std::size_t t = 0; t < monitor_idx.size(); ++t) {
            const std::size_t idx = monitor_idx[t];
            traces[t].push_back({u[0](idx), u[1](idx), u[2](idx), u[3](idx)});
        }
    };

    // second-order residual bookkeeping (3-level ring buffer of p and f)
    const Stencils stencil{modes, g.lx / g.nx, g.ly / g.ny, g.lz / g.nz};
    std::array<Eigen::VectorXd, 3> p_ring, f_ring;
    auto fill_force_field = [&](double t, Eigen::VectorXd& out) {
        out.resize(total);
        if (!has_force) {
            out.setZero();
            return;
        }
        const double amp = profile(t);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz)
                    out(static_cast<Eigen::Index>(modes.index(ix, iy, iz))) =
                        amp * scenario.force_space(Eigen::Vector3d(
                                  ix * g.lx / g.nx, iy * g.ly / g.ny, iz * g.lz / g.nz));
    };
    auto ring_slot = [&](int level) -> int { return ((level % 3) + 3) % 3; };
    if (scenario.second_order_residual) {
        fft.backward(u[0], p_ring[0]);
        fill_force_field(0.0, f_ring[0]);
    }

    const double e0 = energy();
    result.energy_initial = e0;
    result.energy_min = e0;
    result.energy_max = e0;
    result.time.push_back(0.0);
    result.energy.push_back(e0);
    record_traces();

    Eigen::Vector4cd vec, fvec;
    for (int s = 1; s <= steps; ++s) {
        const double t_mid = (s - 0.5) * scenario.dt;
        const double famp = has_force ? profile(t_mid) * scenario.dt : 0.0;
        for (std::size_t m = 0; m < total; ++m) {
            vec = {u[0](m), u[1](m), u[2](m), u[3](m)};
            vec = step_matrix[m] * vec;
            if (has_force && famp != 0.0) {
                fvec.setZero();
                fvec(0) = famp * force_hat(m);
                vec += source_matrix[m] * fvec;
            }
            for (int c = 0; c < 4; ++c) u[c](m) = vec(c);
        }
        const double t = s * scenario.dt;
        const double e = energy();
        result.energy_min = std::min(result.energy_min, e);
        result.energy_max = std::max(result.energy_max, e);
        if (s % std::max(scenario.record_stride, 1) == 0 || s == steps) {
            result.time.push_back(t);
            result.energy.push_back(e);
        }
        record_traces();

        if (scenario.second_order_residual) {
            const int slot = ring_slot(s);
            fft.backward(u[0], p_ring[slot]);
            fill_force_field(t, f_ring[slot]);
            if (s >= 2) {
                // centered residual at level s-1
                const Eigen::VectorXd& pm = p_ring[ring_slot(s - 2)];
                const Eigen::VectorXd& p0 = p_ring[ring_slot(s - 1)];
                const Eigen::VectorXd& pp = p_ring[slot];
                const Eigen::VectorXd& fm = f_ring[ring_slot(s - 2)];
                const Eigen::VectorXd& f0 = f_ring[ring_slot(s - 1)];
                const Eigen::VectorXd& fp = f_ring[slot];
                const double dt = scenario.dt;
                const double v0 = scenario.v0;
                double acc = 0.0;
                for (int ix = 0; ix < g.nx; ++ix)
                    for (int iy = 0; iy < g.ny; ++iy)
                        for (int iz = 0; iz < g.nz; ++iz) {
                            const std::size_t i = modes.index(ix, iy, iz);
                            const double ptt =
                                (pp(i) - 2.0 * p0(i) + pm(i)) / (dt * dt);
                            const double ptz = (stencil.d1(pp, ix, iy, iz, 2) -
                                                stencil.d1(pm, ix, iy, iz, 2)) /
                                               (2.0 * dt);
                            const double lap = stencil.d2(p0, ix, iy, iz, 0) +
                                               stencil.d2(p0, ix, iy, iz, 1) +
                                               (1.0 - v0 * v0) * stencil.d2(p0, ix, iy, iz, 2);
                            const double rhs = (fp(i) - fm(i)) / (2.0 * dt) +
                                               v0 * stencil.d1(f0, ix, iy, iz, 2);
                            const double r = ptt + 2.0 * v0 * ptz - lap - rhs;
                            acc += r * r;
                        }
                result.residual_time.push_back(t - dt);
                result.residual_norm.push_back(std::sqrt(acc * cell_volume));
            }
        }
    }

    // dispersion extraction: project traces on the symbol eigenvectors and
    // average the per-step phase increments
    for (std::size_t t = 0; t < monitor_idx.size(); ++t) {
        const Eigen::Vector3d k = modes.k_at(monitor_idx[t]);
        const Eigen::Matrix4d h = symbol(k, scenario.v0);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(h);
        const Eigen::Vector4d analytic = analytic_symbol_frequencies(k, scenario.v0);
        for (int branch = 0; branch < 4; ++branch) {
            const Eigen::Vector4d w = eig.eigenvectors().col(branch);
            double theta_sum = 0.0;
            int count = 0;
            double max_mag = 0.0;
            std::vector<Complex> proj(traces[t].size());
            for (std::size_t n = 0; n < traces[t].size(); ++n) {
                proj[n] = w.cast<Complex>().dot(traces[t][n]);
                max_mag = std::max(max_mag, std::abs(proj[n]));
            }
            for (std::size_t n = 0; n + 1 < proj.size(); ++n) {
                if (std::abs(proj[n]) < 1e-12 * max_mag ||
                    std::abs(proj[n + 1]) < 1e-12 * max_mag)
                    continue;
                theta_sum += std::arg(proj[n + 1] * std::conj(proj[n]));
                ++count;
            }
            DispersionRow row;
            row.mode = scenario.monitor_modes[t];
            row.k = k;
            row.branch = branch;
            row.freq_analytic = analytic(branch);
            row.freq_numeric = count ? -theta_sum / (count * scenario.dt) : 0.0;
            const double denom = std::max(std::abs(row.freq_analytic), k.norm());
            row.rel_error = denom > 0.0 ? std::abs(row.freq_numeric - row.freq_analytic) / denom
                                        : std::abs(row.freq_numeric);
            result.dispersion.push_back(row);
        }
    }

    result.final_fields.resize(4, static_cast<Eigen::Index>(total));
    Eigen::VectorXd field;
    for (int c = 0; c < 4; ++c) {
        fft.backward(u[c], field, &result.max_imaginary);
        result.final_fields.row(c) = field.transpose();
    }
    return result;
}

}  // namespace driftwave::cart
