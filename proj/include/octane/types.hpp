#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace octane {

using ArrayX = Eigen::ArrayXd;
using ArrayXc = Eigen::ArrayXcd;
using MatrixX = Eigen::MatrixXd;
using VectorX = Eigen::VectorXd;

// One row per time slot: (Re x, Im x, Re y, Im y).
using SymbolStream = Eigen::Matrix<double, Eigen::Dynamic, 4>;

inline constexpr double kSpeedOfLight = 299792458.0;      // m/s
inline constexpr double kPlanck = 6.62607015e-34;          // J s
inline constexpr std::complex<double> kImag{0.0, 1.0};

inline constexpr const char* kToolkitVersion = "octane 0.1.0";

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

}  // namespace octane
