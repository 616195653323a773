//! Schur-test witness construction and numerical spot checks.
//!
//! The sufficiency proofs run a Schur test with power functions
//! `h_1(u,η) = g(Im u)^{s_1} g(Im η)^{s_2}` and
//! `h_2(z,w) = g(Im z)^{r_1} g(Im w)^{r_2}` against the weight-normalized
//! kernels `K_i = g^{a_i} g^{b_i-α_i} / |Q|^{c_i}`. This module solves the
//! inequality chains for `(r, s)` in exact rational arithmetic, derives
//! the split exponents `(γ, δ)` with `γ_i + δ_i = 1`, verifies every
//! bookkeeping identity before returning, and estimates the two Schur
//! integrals at probe points by Monte Carlo.
//!
//! `r_i` and `s_i` are placed at the midpoints of their open intervals:
//! the theory only asserts existence, and midpoints keep the numerical
//! checks far from the divergence boundaries.

use crate::conditions::{self, ConditionsError, TheoremId};
use crate::geometry::TubePoint;
use crate::kernels::{FRParams, Factor, SpaceSpec};
use crate::quadrature::{single_pole_mc, McEstimate, SamplingConfig};
use crate::ratio::{format_rat, rint, serde_rat_pair, to_f64, Rat};
use crate::sampling::{rng_for, TubeProposal};
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SchurError {
    #[error("witness infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Conditions(#[from] ConditionsError),
    #[error("witness invariant violated (module bug): {0}")]
    InvariantViolated(String),
    #[error("divergence suspected in Schur integral: {0}")]
    DivergenceSuspected(String),
    #[error(transparent)]
    Quadrature(#[from] crate::quadrature::QuadratureError),
}

/// Which sufficiency scheme the witness instantiates, keyed by the shape
/// of the source exponent pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessVariant {
    /// Both source exponents above 1.
    FullRange,
    /// `p = (1, p_2)`: first factor in the sup form.
    FirstL1,
    /// `p = (p_1, 1)`: second factor in the sup form.
    SecondL1,
    /// `p = (1, 1)`: both factors in the sup form.
    BothL1,
}

impl WitnessVariant {
    pub fn gate(self) -> TheoremId {
        match self {
            WitnessVariant::FullRange => TheoremId::Sufficiency,
            WitnessVariant::FirstL1 => TheoremId::FirstL1Sufficiency,
            WitnessVariant::SecondL1 => TheoremId::SecondL1Sufficiency,
            WitnessVariant::BothL1 => TheoremId::BothL1Sufficiency,
        }
    }

    /// The exponent-split form a factor uses.
    pub fn form(self, f: Factor) -> FactorForm {
        match (self, f) {
            (WitnessVariant::FullRange, _) => FactorForm::PPrime,
            (WitnessVariant::FirstL1, Factor::First) => FactorForm::Sup,
            (WitnessVariant::FirstL1, Factor::Second) => FactorForm::PPrime,
            (WitnessVariant::SecondL1, Factor::First) => FactorForm::PPrime,
            (WitnessVariant::SecondL1, Factor::Second) => FactorForm::Sup,
            (WitnessVariant::BothL1, _) => FactorForm::Sup,
        }
    }

    // The g-exponent coefficient in the factor's inequality chain. The
    // one-sided scheme folds a into the first-factor coefficient; the
    // others use the weight-normalized kernel exponent alone.
    fn chain_coefficient(self, f: Factor, params: &FRParams, spaces: &SpaceSpec) -> Rat {
        let base = params.b(f) - spaces.alpha(f);
        match (self, f) {
            (WitnessVariant::SecondL1, Factor::First) => params.a(f) + base,
            _ => base,
        }
    }
}

/// How a factor's split exponent `γ` is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorForm {
    /// `γ = ((n+α)/p' + s - r) / τ`; requires `p > 1`.
    PPrime,
    /// `γ = (s - r) / τ`; the essential-supremum route.
    Sup,
}

/// The auxiliary exponents of one sufficiency proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurWitness {
    #[serde(with = "serde_rat_pair")]
    pub r: [Rat; 2],
    #[serde(with = "serde_rat_pair")]
    pub s: [Rat; 2],
    #[serde(with = "serde_rat_pair")]
    pub gamma: [Rat; 2],
    #[serde(with = "serde_rat_pair")]
    pub delta: [Rat; 2],
    #[serde(with = "serde_rat_pair")]
    pub tau: [Rat; 2],
    pub variant: WitnessVariant,
}

impl SchurWitness {
    pub fn r(&self, f: Factor) -> &Rat {
        &self.r[f.index()]
    }

    pub fn s(&self, f: Factor) -> &Rat {
        &self.s[f.index()]
    }

    pub fn gamma(&self, f: Factor) -> &Rat {
        &self.gamma[f.index()]
    }

    pub fn delta(&self, f: Factor) -> &Rat {
        &self.delta[f.index()]
    }

    pub fn tau(&self, f: Factor) -> &Rat {
        &self.tau[f.index()]
    }
}

fn n_rat(n: usize) -> Rat {
    rint(n as i64)
}

pub(crate) struct FactorSolution {
    r: Rat,
    s: Rat,
    gamma: Rat,
    delta: Rat,
    tau: Rat,
}

// Solves one factor's chain
//   lo0 < τ s + B (s - r) < hi0
// for s, with the endpoints depending on the form:
//   PPrime: lo0 = -τ(1+α)/p' - B(n+α)/p',  hi0 = B(n+β)/q
//   Sup:    lo0 = 0,                        hi0 = B(n+β)/q
pub(crate) fn solve_factor(
    variant: WitnessVariant,
    f: Factor,
    params: &FRParams,
    spaces: &SpaceSpec,
) -> Result<FactorSolution, SchurError> {
    let i = f.index() + 1;
    let n = n_rat(params.n);
    let alpha = spaces.alpha(f);
    let beta = spaces.beta(f);
    let q = spaces.q(f);
    let tau = params.c(f) - params.a(f) - params.b(f) + alpha;
    if tau <= rint(0) {
        return Err(SchurError::Infeasible(format!(
            "tau{i} = {} is not positive",
            format_rat(&tau)
        )));
    }
    let r = -(Rat::one() + beta) / (rint(2) * q);
    let chain_b = variant.chain_coefficient(f, params, spaces);
    let (lo0, hi0) = match variant.form(f) {
        FactorForm::PPrime => {
            let p_conj = spaces.p_conj(f).ok_or_else(|| {
                SchurError::Infeasible(format!(
                    "factor {i} needs p{i} > 1 for the integral form, got p{i} = {}",
                    format_rat(spaces.p(f))
                ))
            })?;
            (
                -&tau * (Rat::one() + alpha) / &p_conj - &chain_b * (&n + alpha) / &p_conj,
                &chain_b * (&n + beta) / q,
            )
        }
        FactorForm::Sup => (rint(0), &chain_b * (&n + beta) / q),
    };
    let denom = &tau + &chain_b;
    if denom <= rint(0) {
        return Err(SchurError::Infeasible(format!(
            "chain coefficient tau{i} + B{i} = {} is not positive",
            format_rat(&denom)
        )));
    }
    let lo = (&lo0 + &chain_b * &r) / &denom;
    let hi = (&hi0 + &chain_b * &r) / &denom;
    if lo >= hi {
        return Err(SchurError::Infeasible(format!(
            "empty s{i} interval: ({}, {})",
            format_rat(&lo),
            format_rat(&hi)
        )));
    }
    let s = (&lo + &hi) / rint(2);
    let gamma = match variant.form(f) {
        FactorForm::PPrime => {
            let p_conj = spaces.p_conj(f).expect("checked above");
            ((&n + alpha) / &p_conj + &s - &r) / &tau
        }
        FactorForm::Sup => (&s - &r) / &tau,
    };
    let delta = ((&n + beta) / q + &r - &s) / &tau;
    Ok(FactorSolution {
        r,
        s,
        gamma,
        delta,
        tau,
    })
}

/// Verifies every exact identity and inequality a witness must satisfy.
pub fn verify_witness(
    witness: &SchurWitness,
    params: &FRParams,
    spaces: &SpaceSpec,
) -> Result<(), SchurError> {
    let n = n_rat(params.n);
    let fail = |msg: String| Err(SchurError::InvariantViolated(msg));
    for f in Factor::BOTH {
        let i = f.index() + 1;
        let (r, s) = (witness.r(f), witness.s(f));
        let (gamma, delta, tau) = (witness.gamma(f), witness.delta(f), witness.tau(f));
        let (a, b, c) = (params.a(f), params.b(f), params.c(f));
        let (alpha, beta, q) = (spaces.alpha(f), spaces.beta(f), spaces.q(f));

        if gamma + delta != Rat::one() {
            return fail(format!("gamma{i} + delta{i} != 1"));
        }
        if *tau != c - a - b + alpha || *tau <= rint(0) {
            return fail(format!("tau{i} != c - a - b + alpha or not positive"));
        }
        if !(-(Rat::one() + beta) / q < *r && *r < rint(0)) {
            return fail(format!("r{i} outside (-(1+beta)/q, 0)"));
        }
        // q-side bookkeeping, common to every form
        if q * r + beta <= -Rat::one() {
            return fail(format!("r{i} q{i} + beta{i} <= -1"));
        }
        let lhs = &n + r * q + beta - c * delta * q;
        let rhs = s * q - (a + b - alpha) * delta * q;
        if lhs != rhs {
            return fail(format!("q-side exponent identity fails for factor {i}"));
        }
        match witness.variant.form(f) {
            FactorForm::PPrime => {
                let p_conj = spaces.p_conj(f).ok_or_else(|| {
                    SchurError::InvariantViolated(format!("p{i} = 1 in an integral-form factor"))
                })?;
                let chain_b = witness.variant.chain_coefficient(f, params, spaces);
                if &chain_b * gamma * &p_conj + s * &p_conj + alpha <= -Rat::one() {
                    return fail(format!("p'-side weight exponent <= -1 for factor {i}"));
                }
                let lhs = &n + (a + b - alpha) * gamma * &p_conj + s * &p_conj + alpha
                    - c * gamma * &p_conj;
                if lhs != r * &p_conj {
                    return fail(format!("p'-side exponent identity fails for factor {i}"));
                }
            }
            FactorForm::Sup => {
                if (b - alpha) * gamma + s <= rint(0) {
                    return fail(format!("sup-form numerator exponent <= 0 for factor {i}"));
                }
            }
        }
    }
    Ok(())
}

/// Solves the sufficiency inequality chains for the witness exponents.
///
/// The corresponding sufficiency verdict is checked first; a failing
/// verdict, an empty interval, or a nonpositive `τ` all surface as
/// [`SchurError::Infeasible`]. Every returned witness has been run
/// through [`verify_witness`].
pub fn witness_solve(
    params: &FRParams,
    spaces: &SpaceSpec,
    variant: WitnessVariant,
) -> Result<SchurWitness, SchurError> {
    let verdict = conditions::evaluate(variant.gate(), params, spaces)?;
    if !verdict.holds {
        let failing: Vec<&str> = verdict
            .clauses
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.text.as_str())
            .collect();
        return Err(SchurError::Infeasible(format!(
            "sufficiency conditions fail: {}",
            failing.join("; ")
        )));
    }
    let first = solve_factor(variant, Factor::First, params, spaces)?;
    let second = solve_factor(variant, Factor::Second, params, spaces)?;
    let witness = SchurWitness {
        r: [first.r, second.r],
        s: [first.s, second.s],
        gamma: [first.gamma, second.gamma],
        delta: [first.delta, second.delta],
        tau: [first.tau, second.tau],
        variant,
    };
    verify_witness(&witness, params, spaces)?;
    Ok(witness)
}

/// Which of the two Schur inequalities to probe: the source-side test
/// against `h_2` or the target-side test against `h_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchurSide {
    Source,
    Target,
}

/// One probe of a Schur inequality: the Monte Carlo left side, the exact
/// power-function right side, and their ratio (the empirical constant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurProbeCheck {
    pub side: SchurSide,
    pub lhs: McEstimate,
    pub rhs: f64,
    pub ratio: f64,
}

// Streams the sample cloud and returns the supremum of `f` over it.
fn cloud_sup(
    f: impl Fn(&TubePoint) -> f64,
    n: usize,
    cfg: &SamplingConfig,
) -> Result<f64, SchurError> {
    let proposal = TubeProposal::new(n, cfg.scale).map_err(crate::quadrature::QuadratureError::from)?;
    let mut rng = rng_for(cfg.seed);
    let mut sup = f64::NEG_INFINITY;
    for _ in 0..cfg.total_samples() {
        let (point, _) = proposal.sample(&mut rng);
        sup = sup.max(f(&point));
    }
    Ok(sup)
}

fn require_converged(est: &McEstimate, what: &str) -> Result<(), SchurError> {
    if est.diverged {
        Err(SchurError::DivergenceSuspected(what.to_string()))
    } else {
        Ok(())
    }
}

/// Monte Carlo check of one Schur inequality at a probe pair.
///
/// Both sides factorize over the two slots, so each factor contributes
/// either a single-pole integral or a sample-cloud supremum, composed per
/// the variant's scheme. The ratio `lhs / rhs` is the empirical constant
/// at that probe; the theory asserts it is bounded uniformly, the check
/// reports it probe by probe and never claims uniformity.
pub fn schur_check(
    witness: &SchurWitness,
    params: &FRParams,
    spaces: &SpaceSpec,
    probe: (&TubePoint, &TubePoint),
    side: SchurSide,
    cfg: &SamplingConfig,
) -> Result<SchurProbeCheck, SchurError> {
    let n = params.n;
    let kernel = params.kernel();
    let (z, w) = probe;
    let g_z = z.im().g();
    let g_w = w.im().g();
    let to = to_f64;
    let lhs = match side {
        SchurSide::Source => {
            let gamma = [to(witness.gamma(Factor::First)), to(witness.gamma(Factor::Second))];
            let s_w = [to(witness.s(Factor::First)), to(witness.s(Factor::Second))];
            let b_adj = [
                to(&(params.b(Factor::First) - spaces.alpha(Factor::First))),
                to(&(params.b(Factor::Second) - spaces.alpha(Factor::Second))),
            ];
            let alpha = [to(spaces.alpha(Factor::First)), to(spaces.alpha(Factor::Second))];
            match witness.variant {
                WitnessVariant::FullRange => {
                    let p1c = to(&spaces.p_conj(Factor::First).expect("gate ensures p1 > 1"));
                    let p2c = to(&spaces.p_conj(Factor::Second).expect("gate ensures p2 > 1"));
                    let j1 = single_pole_mc(
                        z,
                        b_adj[0] * gamma[0] * p1c + s_w[0] * p1c + alpha[0],
                        kernel.c[0] * gamma[0] * p1c,
                        &cfg.stream(41),
                    )?;
                    require_converged(&j1, "source-side first-factor integral")?;
                    let j2 = single_pole_mc(
                        w,
                        b_adj[1] * gamma[1] * p2c + s_w[1] * p2c + alpha[1],
                        kernel.c[1] * gamma[1] * p2c,
                        &cfg.stream(42),
                    )?;
                    require_converged(&j2, "source-side second-factor integral")?;
                    let prefactor = g_z.powf(kernel.a[0] * gamma[0] * p2c)
                        * g_w.powf(kernel.a[1] * gamma[1] * p2c);
                    j1.powf(p2c / p1c).mul(&j2).scaled(prefactor)
                }
                WitnessVariant::BothL1 => {
                    let sup1 = cloud_sup(
                        |u| {
                            g_z.powf(kernel.a[0] * gamma[0])
                                * u.im().g().powf(b_adj[0] * gamma[0] + s_w[0])
                                * crate::geometry::q_diff(z, u).norm().powf(-kernel.c[0] * gamma[0])
                        },
                        n,
                        &cfg.stream(43),
                    )?;
                    let sup2 = cloud_sup(
                        |eta| {
                            g_w.powf(kernel.a[1] * gamma[1])
                                * eta.im().g().powf(b_adj[1] * gamma[1] + s_w[1])
                                * crate::geometry::q_diff(w, eta)
                                    .norm()
                                    .powf(-kernel.c[1] * gamma[1])
                        },
                        n,
                        &cfg.stream(44),
                    )?;
                    McEstimate {
                        value: sup1 * sup2,
                        stderr: 0.0,
                        n_samples: 2 * cfg.total_samples(),
                        seed: cfg.seed,
                        diverged: false,
                    }
                }
                WitnessVariant::SecondL1 => {
                    // sup over the second slot of the first-slot integral
                    let p1c = to(&spaces.p_conj(Factor::First).expect("gate ensures p1 > 1"));
                    let j1 = single_pole_mc(
                        z,
                        b_adj[0] * gamma[0] * p1c + s_w[0] * p1c + alpha[0],
                        kernel.c[0] * gamma[0] * p1c,
                        &cfg.stream(45),
                    )?;
                    require_converged(&j1, "source-side first-factor integral")?;
                    let sup2 = cloud_sup(
                        |eta| {
                            (g_w.powf(kernel.a[1] * gamma[1])
                                * eta.im().g().powf(b_adj[1] * gamma[1] + s_w[1])
                                * crate::geometry::q_diff(w, eta)
                                    .norm()
                                    .powf(-kernel.c[1] * gamma[1]))
                            .powf(p1c)
                        },
                        n,
                        &cfg.stream(46),
                    )?;
                    j1.scaled(g_z.powf(kernel.a[0] * gamma[0] * p1c) * sup2)
                }
                WitnessVariant::FirstL1 => {
                    // integral over the second slot of the first-slot sup
                    let p2c = to(&spaces.p_conj(Factor::Second).expect("gate ensures p2 > 1"));
                    let sup1 = cloud_sup(
                        |u| {
                            g_z.powf(kernel.a[0] * gamma[0])
                                * u.im().g().powf(b_adj[0] * gamma[0] + s_w[0])
                                * crate::geometry::q_diff(z, u).norm().powf(-kernel.c[0] * gamma[0])
                        },
                        n,
                        &cfg.stream(47),
                    )?;
                    let j2 = single_pole_mc(
                        w,
                        (b_adj[1] * gamma[1] + s_w[1]) * p2c + alpha[1],
                        kernel.c[1] * gamma[1] * p2c,
                        &cfg.stream(48),
                    )?;
                    require_converged(&j2, "source-side second-factor integral")?;
                    j2.scaled(sup1.powf(p2c) * g_w.powf(kernel.a[1] * gamma[1] * p2c))
                }
            }
        }
        SchurSide::Target => {
            // uniform across variants: integrals against the target measures
            let delta = [to(witness.delta(Factor::First)), to(witness.delta(Factor::Second))];
            let r_w = [to(witness.r(Factor::First)), to(witness.r(Factor::Second))];
            let b_adj = [
                to(&(params.b(Factor::First) - spaces.alpha(Factor::First))),
                to(&(params.b(Factor::Second) - spaces.alpha(Factor::Second))),
            ];
            let beta = [to(spaces.beta(Factor::First)), to(spaces.beta(Factor::Second))];
            let q1 = to(spaces.q(Factor::First));
            let q2 = to(spaces.q(Factor::Second));
            let j1 = single_pole_mc(
                z,
                kernel.a[0] * delta[0] * q1 + r_w[0] * q1 + beta[0],
                kernel.c[0] * delta[0] * q1,
                &cfg.stream(51),
            )?;
            require_converged(&j1, "target-side first-factor integral")?;
            let j2 = single_pole_mc(
                w,
                kernel.a[1] * delta[1] * q2 + r_w[1] * q2 + beta[1],
                kernel.c[1] * delta[1] * q2,
                &cfg.stream(52),
            )?;
            require_converged(&j2, "target-side second-factor integral")?;
            let prefactor =
                g_z.powf(b_adj[0] * delta[0] * q2) * g_w.powf(b_adj[1] * delta[1] * q2);
            j1.powf(q2 / q1).mul(&j2).scaled(prefactor)
        }
    };
    let rhs = match side {
        SchurSide::Source => {
            let exponent = match witness.variant {
                WitnessVariant::FullRange => {
                    to(&spaces.p_conj(Factor::Second).expect("gate ensures p2 > 1"))
                }
                WitnessVariant::BothL1 => 1.0,
                WitnessVariant::SecondL1 => {
                    to(&spaces.p_conj(Factor::First).expect("gate ensures p1 > 1"))
                }
                WitnessVariant::FirstL1 => {
                    to(&spaces.p_conj(Factor::Second).expect("gate ensures p2 > 1"))
                }
            };
            g_z.powf(to(witness.r(Factor::First)) * exponent)
                * g_w.powf(to(witness.r(Factor::Second)) * exponent)
        }
        SchurSide::Target => {
            let q2 = to(spaces.q(Factor::Second));
            g_z.powf(to(witness.s(Factor::First)) * q2)
                * g_w.powf(to(witness.s(Factor::Second)) * q2)
        }
    };
    Ok(SchurProbeCheck {
        side,
        lhs,
        rhs,
        ratio: lhs.value / rhs,
    })
}
