// irsfd  simulation and optimization toolkit for IRS-assisted full-duplex links
// Copyright (C) 2026 irsfd contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Shared numeric helpers: unit conversions, seeded random streams, hashing,
// and the complex linear-algebra typedefs used across the library.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace irsfd {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

// splitmix64 step; used to derive independent substream seeds from a master
// seed plus stream tags without correlations between adjacent tags.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(mix64(seed) ^ mix64(tag ^ 0x5bf03635d44b8f8dULL));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
    return mix_seed(mix_seed(seed, tag_a), tag_b);
}

// FNV-1a over a byte string; stable across platforms, used for config hashes.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seeded random stream. Gaussian draws use the Box-Muller transform on
// explicitly constructed uniforms so that sequences are reproducible across
// standard-library implementations (std::normal_distribution is not
// specified bit-exactly).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on (0, 1): 53-bit mantissa offset by half an ulp so 0 and 1
    // are excluded.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform angle on [0, 2*pi).
    double angle() { return 2.0 * kPi * (static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0)); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Circularly symmetric complex Gaussian with unit variance, CN(0, 1).
    cplx cgaussian() {
        double re = gaussian();
        double im = gaussian();
        return cplx(re * M_SQRT1_2, im * M_SQRT1_2);
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Isometric packing of a Hermitian matrix into a real vector: diagonal
// entries, then sqrt(2)-scaled real and imaginary parts of the strict upper
// triangle. The packing preserves the Frobenius inner product, so Euclidean
// gradients and projections in packed coordinates match the matrix-space
// ones.
inline RVec hermitian_pack(const CMat& h) {
    const int n = static_cast<int>(h.rows());
    if (h.cols() != n) throw std::invalid_argument("hermitian_pack: matrix not square");
    RVec x(n * n);
    int idx = 0;
    for (int i = 0; i < n; ++i) x[idx++] = h(i, i).real();
    const double s = std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) x[idx++] = s * h(i, j).real();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) x[idx++] = s * h(i, j).imag();
    return x;
}

inline CMat hermitian_unpack(const RVec& x, int n) {
    if (x.size() != static_cast<Eigen::Index>(n) * n)
        throw std::invalid_argument("hermitian_unpack: size mismatch");
    CMat h(n, n);
    int idx = 0;
    for (int i = 0; i < n; ++i) h(i, i) = x[idx++];
    const double s = M_SQRT1_2;
    std::vector<double> re((n * (n - 1)) / 2), im((n * (n - 1)) / 2);
    for (auto& v : re) v = x[idx++];
    for (auto& v : im) v = x[idx++];
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++k) {
            h(i, j) = cplx(re[k] * s, im[k] * s);
            h(j, i) = std::conj(h(i, j));
        }
    return h;
}

}  // namespace irsfd
