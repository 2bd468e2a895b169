#pragma once

// SUSY partner ground state Psi+, first-order logarithmic perturbation
// theory (energy splitting E1, log-WF correction G1 and its derivative g1),
// the first excited state Psi1- built from them, and the two-term transition
// density.  Construction performs the cached quadratures; the resulting
// evaluators are immutable and cheap to copy (shared internals).

#include "nes/params.hpp"
#include "nes/potential.hpp"

#include <memory>
#include <vector>

namespace nes {

class PartnerGroundState {
  public:
    explicit PartnerGroundState(const NesParams& p);

    const NesParams& params() const { return params_; }
    const GroundState& gs() const { return gs_; }

    double I_plus() const { return I_plus_; }
    double I_minus() const { return I_minus_; }
    // perturbation coupling 2 h^4 Psi0^2(0) / (I+ I-)
    double alpha() const { return alpha_; }

    // log-stable Psi+; exact tail-mass form on both sides of the junction
    double log_psi_plus(double y) const;
    double psi_plus(double y) const;
    double dlog_psi_plus(double y) const;
    // value and first two derivatives (analytic)
    void psi_plus_derivs(double y, double* v, double* d1, double* d2) const;

  private:
    NesParams params_;
    GroundState gs_;
    double I_plus_, I_minus_, alpha_;
    double log_2Ip_, log_2Im_;
};

inline PartnerGroundState partner_ground_state(const NesParams& p) {
    return PartnerGroundState(p);
}

class LptFirstOrder {
  public:
    explicit LptFirstOrder(const PartnerGroundState& pg);

    double alpha() const;
    // exact-quadrature unperturbed-units energy Psi+^2(0) / int Psi+^2
    double E1_bar() const;
    // barrier-top Gaussian variant; NaN for single-well potentials.  For
    // high barriers alpha * E1_bar_gauss approaches E1 (the variant folds a
    // factor 1/4 in through its junction normalization).
    double E1_bar_gauss() const;
    // first energy splitting E1 = (alpha/4) E1_bar; escape rate E1/h^2
    double E1() const;
    // normalization of the first-order-corrected partner ground state
    double C1() const;

    double G1(double x) const;
    double g1(double x) const;        // G1'
    double g1_prime(double x) const;  // analytic derivative of g1 away from 0

    double domain_lo() const;
    double domain_hi() const;

    const PartnerGroundState& partner() const;

    struct Impl;
    const Impl& impl() const { return *impl_; }

  private:
    std::shared_ptr<const Impl> impl_;
};

inline LptFirstOrder lpt_first_order(const PartnerGroundState& pg) {
    return LptFirstOrder(pg);
}

// Generic recursion step for higher orders: energy E_n_bar and log-derivative
// correction g_n from the already-cached lower orders.  Order 1 reproduces
// the wired g1/E1_bar (junction-sourced); order n >= 2 uses the quadratic
// source sum_{j=1}^{n-1} g_j g_{n-j} and is continuous at 0.  Only order 1
// feeds the public pipeline; higher orders are exposed for experiments.
struct LptOrder {
    int order = 0;
    double E_bar = 0.0;
    std::vector<double> g_nodes;  // on the cache grid of the parent LptFirstOrder
};
LptOrder lpt_order_step(const LptFirstOrder& lpt, const std::vector<LptOrder>& lower);

class FirstExcited {
  public:
    double operator()(double y) const;
    double derivative(double y) const;
    bool validity_warning() const { return validity_warning_; }

  private:
    friend FirstExcited first_excited_state(const PartnerGroundState&, const LptFirstOrder&);
    std::shared_ptr<const LptFirstOrder> lpt_;
    double scale_ = 1.0;
    bool validity_warning_ = false;
};

// normalized first excited state of the return Hamiltonian
FirstExcited first_excited_state(const PartnerGroundState& pg, const LptFirstOrder& lpt);

class TransitionDensity {
  public:
    double operator()(double y) const;
    // coefficient of the decaying term, Psi1(y0)/Psi0(y0) e^{-t E1/h^2}
    double coefficient() const { return coeff_; }
    // true when the first-order term pushes the density negative somewhere
    bool negative_region() const { return negative_region_; }

  private:
    friend TransitionDensity transition_density_two_term(const NesParams&, double, double);
    std::shared_ptr<const LptFirstOrder> lpt_;
    FirstExcited psi1_;
    double coeff_ = 0.0;
    bool negative_region_ = false;
};

// p(y, t | y0) = Psi0^2(y) + (Psi1(y0)/Psi0(y0)) e^{-t E1/h^2} Psi0(y) Psi1(y)
TransitionDensity transition_density_two_term(const NesParams& p, double y0, double t);

}  // namespace nes
