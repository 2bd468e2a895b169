#pragma once

// Ground state wave function Psi0 of the return Hamiltonian, the stationary
// density Psi0^2 as an explicit three-component Gaussian mixture, and the
// implied Langevin potential V(y) = -h^2 log Psi0(y) + V0 with its analytic
// derivatives and critical points.

#include "nes/mixture.hpp"
#include "nes/params.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace nes {

// Log-stable evaluator for
//   Psi0(y) = C [ (1-a) phi(y | mu1 T, sigma1^2 T) + a phi(y | mu2 T, sigma2^2 T) ].
// Evaluation picks the pointwise-dominant component and folds the other one
// in through log1p, so |y| out to 50 stdevs poses no overflow problem.
class Psi0 {
  public:
    explicit Psi0(const NesParams& p);

    double log_value(double y) const;
    double value(double y) const { return std::exp(log_value(y)); }

    // first/second derivative of log Psi0 (responsibility-weighted forms)
    void log_derivs(double y, double* d1, double* d2) const;

    double C2() const { return C2_; }
    double Omega() const { return Omega_; }

  private:
    double m1_, m2_;    // component means mu_k T
    double v1_, v2_;    // component variances sigma_k^2 T
    double lw1_, lw2_;  // log prefactors log(C w_k / sqrt(2 pi v_k)); -inf when w_k = 0
    double Omega_, C2_;
};

// Psi0^2 written out as a normalized three-component mixture.
struct StationaryDensity {
    GaussianMixture mixture;       // means mu_k T, stdevs sigma_k sqrt(T/2)
    std::array<double, 3> omega;   // the three weights (sum to 1 by construction)
    double Omega;                  // unnormalized weight sum
    double C2;                     // squared WF normalization constant
    double mu3;                    // cross-term component location
    double sigma3;                 // cross-term component scale, sigma3^2 = 2 s1^2 s2^2/(s1^2+s2^2)
};

struct GroundState {
    NesParams params;
    Psi0 psi;
    StationaryDensity density;
};

GroundState ground_state(const NesParams& p);

enum class CritKind { minimum, maximum };

struct CriticalPoint {
    double y;
    CritKind kind;
};

class PotentialFn {
  public:
    // Scans V' for roots on [mu2 T - 10 sigma2 sqrt(T), mu1 T + 10 sigma1 sqrt(T)]
    // (2001-point sign scan + bisection to 1e-12) and fixes the gauge V0 so
    // that min V = 0 over the critical points.
    explicit PotentialFn(const NesParams& p);

    const NesParams& params() const { return params_; }
    const Psi0& psi() const { return psi_; }
    double V0() const { return V0_; }
    const std::vector<CriticalPoint>& critical_points() const { return critical_points_; }

  private:
    NesParams params_;
    Psi0 psi_;
    double V0_;
    std::vector<CriticalPoint> critical_points_;
};

inline PotentialFn make_potential(const NesParams& p) { return PotentialFn(p); }

double potential_value(const PotentialFn& p, double y);

struct PotentialDerivs {
    double V1;  // V'
    double V2;  // V''
    double W;   // superpotential V'/sqrt(2)
};
PotentialDerivs potential_derivs(const PotentialFn& p, double y);

// ascending in y; one entry (min) or three (min, max, min)
const std::vector<CriticalPoint>& find_critical_points(const PotentialFn& p);

bool is_double_well(const PotentialFn& p);

// the minimum with the lowest V; for double wells the deeper one
CriticalPoint global_minimum(const PotentialFn& p);

}  // namespace nes
