//! Closed-form exponent calculus for the model integrals.
//!
//! Two integral reductions drive the whole theory: the two-pole identity
//! `∫ g(Im u)^l / (Q(z-ū)^r Q(u-ξ̄)^s) dV(u) = C · Q(z-ξ̄)^{n-r-s+l}`
//! and its single-pole modulus version
//! `∫ g(Im u)^l / |Q(z-ū)|^s dV(u) = C · g(Im z)^{n-s+l}`.
//! Both hold only on an explicit parameter region and blow up outside it.
//! This module decides validity in exact rational arithmetic and predicts
//! the resulting power-law exponents for the test families
//! `g^l / Q(· + iR)^s` and their images under the operator.
//!
//! The unknown constants are never computed; downstream quadrature checks
//! ratios, where they cancel.

use crate::kernels::{FRParams, Factor, SpaceSpec};
use crate::ratio::{format_rat, rat, rint, serde_opt_rat_pair, serde_rat_pair, Rat};
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClosedFormError {
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),
    #[error("{0} must be positive")]
    NonPositive(String),
}

/// Membership failure: which exact conditions a test family violates.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("test family outside its membership region: {}", failures.join("; "))]
pub struct MembershipError {
    pub failures: Vec<String>,
}

/// Outcome of an exact validity check plus the predicted exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawPrediction {
    pub valid: bool,
    #[serde(with = "crate::ratio::serde_opt_rat")]
    pub exponent: Option<Rat>,
    pub reason: String,
}

impl PowerLawPrediction {
    fn valid(exponent: Rat) -> Self {
        Self {
            valid: true,
            exponent: Some(exponent),
            reason: String::new(),
        }
    }

    fn invalid(failures: Vec<String>) -> Self {
        Self {
            valid: false,
            exponent: None,
            reason: failures.join("; "),
        }
    }

    pub fn exponent(&self) -> Option<&Rat> {
        self.exponent.as_ref()
    }
}

fn n_rat(n: usize) -> Rat {
    rint(n as i64)
}

fn three_halves_n(n: usize) -> Rat {
    rat(3, 2) * n_rat(n)
}

/// Exponent of the two-pole reduction
/// `∫ g^l / (Q(z-ū)^r Q(u-ξ̄)^s) = C · Q(z-ξ̄)^{n-r-s+l}`.
///
/// Valid iff `r, s > (n-1)/2`, `l > -1`, and `r + s - l > 3n/2 - 1`.
pub fn two_pole_exponent(n: usize, l: &Rat, r: &Rat, s: &Rat) -> PowerLawPrediction {
    let half_gap = rat(n as i64 - 1, 2);
    let mut failures = Vec::new();
    if *r <= half_gap {
        failures.push(format!("r > (n-1)/2 fails: r = {}", format_rat(r)));
    }
    if *s <= half_gap {
        failures.push(format!("s > (n-1)/2 fails: s = {}", format_rat(s)));
    }
    if *l <= -Rat::one() {
        failures.push(format!("l > -1 fails: l = {}", format_rat(l)));
    }
    if r + s - l <= three_halves_n(n) - Rat::one() {
        failures.push(format!(
            "r + s - l > 3n/2 - 1 fails: r + s - l = {}",
            format_rat(&(r + s - l))
        ));
    }
    if failures.is_empty() {
        PowerLawPrediction::valid(n_rat(n) - r - s + l)
    } else {
        PowerLawPrediction::invalid(failures)
    }
}

/// Exponent of the single-pole reduction
/// `∫ g^l / |Q(z-ū)|^s = C · g(Im z)^{n-s+l}`, infinite outside the region.
///
/// Valid iff `l > -1` and `l - s < 1 - 3n/2`.
pub fn single_pole_exponent(n: usize, s: &Rat, l: &Rat) -> PowerLawPrediction {
    let mut failures = Vec::new();
    if *l <= -Rat::one() {
        failures.push(format!("l > -1 fails: l = {}", format_rat(l)));
    }
    if l - s >= Rat::one() - three_halves_n(n) {
        failures.push(format!(
            "l - s < 1 - 3n/2 fails: l - s = {}",
            format_rat(&(l - s))
        ));
    }
    if failures.is_empty() {
        PowerLawPrediction::valid(n_rat(n) - s + l)
    } else {
        PowerLawPrediction::invalid(failures)
    }
}

/// Which factors of the test family carry a `g`-numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFnVariant {
    BothFactors,
    FirstOnly,
    SecondOnly,
    Neither,
}

impl TestFnVariant {
    pub fn has_numerator(self, f: Factor) -> bool {
        match (self, f) {
            (TestFnVariant::BothFactors, _) => true,
            (TestFnVariant::FirstOnly, Factor::First) => true,
            (TestFnVariant::SecondOnly, Factor::Second) => true,
            _ => false,
        }
    }
}

/// The separable test family `f_R(z, w)` with factors
/// `g(Im ·)^{l_i} / Q(· + i(0', R))^{s_i}`, the `g`-numerator present only
/// where the variant says so.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFnSpec {
    #[serde(with = "serde_opt_rat_pair")]
    pub l: [Option<Rat>; 2],
    #[serde(with = "serde_rat_pair")]
    pub s: [Rat; 2],
    pub apex: f64,
    pub variant: TestFnVariant,
}

impl TestFnSpec {
    pub fn new(
        l: [Option<Rat>; 2],
        s: [Rat; 2],
        apex: f64,
        variant: TestFnVariant,
    ) -> Result<Self, ClosedFormError> {
        for (i, e) in s.iter().enumerate() {
            if *e <= rint(0) {
                return Err(ClosedFormError::NonPositive(format!(
                    "s{} = {}",
                    i + 1,
                    format_rat(e)
                )));
            }
        }
        if !(apex > 0.0) || !apex.is_finite() {
            return Err(ClosedFormError::NonPositive(format!("apex = {apex}")));
        }
        for f in Factor::BOTH {
            let has = variant.has_numerator(f);
            let present = l[f.index()].is_some();
            if has != present {
                return Err(ClosedFormError::VariantMismatch(format!(
                    "factor {} {} a numerator exponent but l{} is {}",
                    f.index() + 1,
                    if has { "requires" } else { "forbids" },
                    f.index() + 1,
                    if present { "present" } else { "absent" },
                )));
            }
        }
        Ok(Self { l, s, apex, variant })
    }

    /// Convenience constructor for the two-numerator family.
    pub fn both(l: [Rat; 2], s: [Rat; 2], apex: f64) -> Result<Self, ClosedFormError> {
        let [l1, l2] = l;
        Self::new([Some(l1), Some(l2)], s, apex, TestFnVariant::BothFactors)
    }

    /// The numerator exponent of a factor, `0` where absent.
    pub fn l_or_zero(&self, f: Factor) -> Rat {
        self.l[f.index()].clone().unwrap_or_else(|| rint(0))
    }

    pub fn s(&self, f: Factor) -> &Rat {
        &self.s[f.index()]
    }

    pub fn with_apex(&self, apex: f64) -> Result<Self, ClosedFormError> {
        Self::new(self.l.clone(), self.s.clone(), apex, self.variant)
    }
}

// The operator-dependent membership conditions: applicability of the
// two-pole reduction to T f_R and finiteness of the image norm.
fn image_membership_failures(
    spec: &TestFnSpec,
    params: &FRParams,
    spaces: &SpaceSpec,
    f: Factor,
) -> Vec<String> {
    let i = f.index() + 1;
    let n = params.n;
    let l = spec.l_or_zero(f);
    let s = spec.s(f);
    let a = params.a(f);
    let b = params.b(f);
    let c = params.c(f);
    let q = spaces.q(f);
    let beta = spaces.beta(f);
    let mut failures = Vec::new();
    if l <= -Rat::one() - b {
        failures.push(format!("l{i} > -1 - b{i} fails: l{i} = {}", format_rat(&l)));
    }
    if s - &l <= three_halves_n(n) - Rat::one() - c + b {
        failures.push(format!(
            "s{i} - l{i} > 3n/2 - 1 - c{i} + b{i} fails: s{i} - l{i} = {}",
            format_rat(&(s - &l))
        ));
    }
    if q * a + beta <= -Rat::one() {
        failures.push(format!(
            "q{i} a{i} + beta{i} > -1 fails: lhs = {}",
            format_rat(&(q * a + beta))
        ));
    }
    let decay = q * (c - b - a - n_rat(n) + s - &l) - beta;
    if decay <= three_halves_n(n) - Rat::one() {
        failures.push(format!(
            "q{i} (c{i} - b{i} - a{i} - n + s{i} - l{i}) - beta{i} > 3n/2 - 1 fails: lhs = {}",
            format_rat(&decay)
        ));
    }
    failures
}

/// Exponent formula for one factor of `‖f_R‖` in the homogeneity variable
/// `g((0', R)) = R^2`: `l - s + (n+α)/p` (with `l = 0` where absent).
pub fn testfn_exponent_formula(spec: &TestFnSpec, spaces: &SpaceSpec, n: usize, f: Factor) -> Rat {
    let l = spec.l_or_zero(f);
    let s = spec.s(f);
    let p = spaces.p(f);
    let alpha = spaces.alpha(f);
    l - s + (n_rat(n) + alpha) / p
}

/// Exponent formula for one factor of `‖T f_R‖`:
/// `a + b - c + l - s + n + (β+n)/q`.
pub fn image_exponent_formula(
    spec: &TestFnSpec,
    params: &FRParams,
    spaces: &SpaceSpec,
    f: Factor,
) -> Rat {
    let l = spec.l_or_zero(f);
    let s = spec.s(f);
    let a = params.a(f);
    let b = params.b(f);
    let c = params.c(f);
    let q = spaces.q(f);
    let beta = spaces.beta(f);
    a + b - c + l - s + n_rat(params.n) + (beta + n_rat(params.n)) / q
}

/// Predicted power-law exponent of one factor of `‖f_R‖`, gated by the
/// factor's exact membership conditions.
pub fn testfn_norm_exponent(
    spec: &TestFnSpec,
    spaces: &SpaceSpec,
    n: usize,
    f: Factor,
) -> PowerLawPrediction {
    let failures = source_membership_failures_with_n(spec, spaces, n, f);
    if failures.is_empty() {
        PowerLawPrediction::valid(testfn_exponent_formula(spec, spaces, n, f))
    } else {
        PowerLawPrediction::invalid(failures)
    }
}

/// Predicted power-law exponent of one factor of `‖T f_R‖`, gated by the
/// two-pole applicability and image-norm finiteness conditions.
pub fn image_norm_exponent(
    spec: &TestFnSpec,
    params: &FRParams,
    spaces: &SpaceSpec,
    f: Factor,
) -> PowerLawPrediction {
    let failures = image_membership_failures(spec, params, spaces, f);
    if failures.is_empty() {
        PowerLawPrediction::valid(image_exponent_formula(spec, params, spaces, f))
    } else {
        PowerLawPrediction::invalid(failures)
    }
}

/// Full exact membership check for a scaling run: both factors, source and
/// image conditions together.
pub fn full_membership(
    spec: &TestFnSpec,
    params: &FRParams,
    spaces: &SpaceSpec,
) -> Result<(), MembershipError> {
    let mut failures = Vec::new();
    for f in Factor::BOTH {
        failures.extend(source_membership_failures_with_n(spec, spaces, params.n, f));
        failures.extend(image_membership_failures(spec, params, spaces, f));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(MembershipError { failures })
    }
}

fn source_membership_failures_with_n(
    spec: &TestFnSpec,
    spaces: &SpaceSpec,
    n: usize,
    f: Factor,
) -> Vec<String> {
    let i = f.index() + 1;
    let l = spec.l_or_zero(f);
    let s = spec.s(f);
    let p = spaces.p(f);
    let alpha = spaces.alpha(f);
    let mut failures = Vec::new();
    if *s <= n_rat(n) / rint(2) - Rat::one() {
        failures.push(format!("s{i} > n/2 - 1 fails: s{i} = {}", format_rat(s)));
    }
    if *s <= (n_rat(n) - Rat::one()) / p {
        failures.push(format!("s{i} > (n-1)/p{i} fails: s{i} = {}", format_rat(s)));
    }
    if l <= -(Rat::one() + alpha) / p {
        failures.push(format!(
            "l{i} > -(1+alpha{i})/p{i} fails: l{i} = {}",
            format_rat(&l)
        ));
    }
    if s - &l <= (alpha - Rat::one()) / p + three_halves_n(n) / p {
        failures.push(format!(
            "s{i} - l{i} > (alpha{i}-1)/p{i} + 3n/(2 p{i}) fails: s{i} - l{i} = {}",
            format_rat(&(s - &l))
        ));
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;
    use proptest::prelude::*;

    fn pair(v: i64) -> [Rat; 2] {
        [rint(v), rint(v)]
    }

    fn spaces_with_p(p: [Rat; 2]) -> SpaceSpec {
        SpaceSpec::new(p, pair(2), pair(0), pair(0)).unwrap()
    }

    #[test]
    fn two_pole_examples() {
        let ok = two_pole_exponent(2, &rint(0), &rint(2), &rint(2));
        assert!(ok.valid);
        assert_eq!(ok.exponent.unwrap(), rint(-2));

        let bad_r = two_pole_exponent(2, &rint(0), &rat(1, 4), &rint(3));
        assert!(!bad_r.valid);
        assert!(bad_r.reason.contains("r > (n-1)/2"));

        let boundary = two_pole_exponent(2, &rint(0), &rint(1), &rint(1));
        assert!(!boundary.valid);
        assert!(boundary.reason.contains("r + s - l > 3n/2 - 1"));
    }

    #[test]
    fn single_pole_examples() {
        let ok = single_pole_exponent(2, &rint(4), &rint(0));
        assert!(ok.valid);
        assert_eq!(ok.exponent.unwrap(), rint(-2));

        let boundary = single_pole_exponent(2, &rint(2), &rint(0));
        assert!(!boundary.valid);
        assert!(boundary.reason.contains("l - s < 1 - 3n/2"));

        let bad_l = single_pole_exponent(2, &rint(4), &rint(-1));
        assert!(!bad_l.valid);
        assert!(bad_l.reason.contains("l > -1"));
    }

    #[test]
    fn testfn_exponent_both_factors() {
        let spec = TestFnSpec::both([rint(1), rint(1)], [rint(3), rint(3)], 1.0).unwrap();
        let spaces = spaces_with_p(pair(2));
        let pred = testfn_norm_exponent(&spec, &spaces, 2, Factor::First);
        assert!(pred.valid);
        assert_eq!(pred.exponent.unwrap(), rint(-1));
    }

    #[test]
    fn testfn_exponent_first_only_at_p_one() {
        // The nominal formula gives n + l - s + alpha = 0, but the family
        // sits exactly on its membership boundary there, so the gated
        // prediction reports invalid.
        let spec = TestFnSpec::new(
            [Some(rint(1)), None],
            [rint(3), rint(3)],
            1.0,
            TestFnVariant::FirstOnly,
        )
        .unwrap();
        let spaces = spaces_with_p([rint(1), rint(2)]);
        assert_eq!(
            testfn_exponent_formula(&spec, &spaces, 2, Factor::First),
            rint(0)
        );
        let gated = testfn_norm_exponent(&spec, &spaces, 2, Factor::First);
        assert!(!gated.valid);
        assert!(gated.reason.contains("3n/(2 p1)"));

        // Backing s off the boundary restores validity.
        let spec = TestFnSpec::new(
            [Some(rint(1)), None],
            [rat(7, 2), rint(3)],
            1.0,
            TestFnVariant::FirstOnly,
        )
        .unwrap();
        let pred = testfn_norm_exponent(&spec, &spaces, 2, Factor::First);
        assert!(pred.valid);
        assert_eq!(pred.exponent.unwrap(), rat(-1, 2));
    }

    #[test]
    fn testfn_exponent_neither_at_p_one() {
        let spec = TestFnSpec::new(
            [None, None],
            [rint(4), rint(4)],
            1.0,
            TestFnVariant::Neither,
        )
        .unwrap();
        let spaces = spaces_with_p([rint(1), rint(1)]);
        let pred = testfn_norm_exponent(&spec, &spaces, 2, Factor::First);
        assert!(pred.valid);
        assert_eq!(pred.exponent.unwrap(), rint(-2));
    }

    #[test]
    fn image_exponent_examples() {
        let spec = TestFnSpec::both([rint(1), rint(1)], [rint(3), rint(3)], 1.0).unwrap();
        let spaces = spaces_with_p(pair(2));
        let params = FRParams::new(2, pair(1), pair(1), pair(4)).unwrap();
        let pred = image_norm_exponent(&spec, &params, &spaces, Factor::First);
        assert!(pred.valid);
        assert_eq!(pred.exponent.unwrap(), rint(-1));

        let spec7 = TestFnSpec::new(
            [None, None],
            [rint(4), rint(4)],
            1.0,
            TestFnVariant::Neither,
        )
        .unwrap();
        let spaces7 = SpaceSpec::new([rint(1), rint(1)], pair(2), pair(0), pair(0)).unwrap();
        let pred = image_norm_exponent(&spec7, &params, &spaces7, Factor::First);
        assert!(pred.valid);
        assert_eq!(pred.exponent.unwrap(), rint(-3));
    }

    #[test]
    fn variant_consistency_enforced() {
        assert!(matches!(
            TestFnSpec::new(
                [Some(rint(1)), Some(rint(1))],
                [rint(3), rint(3)],
                1.0,
                TestFnVariant::FirstOnly,
            ),
            Err(ClosedFormError::VariantMismatch(_))
        ));
        assert!(matches!(
            TestFnSpec::new([None, None], [rint(3), rint(3)], 0.0, TestFnVariant::Neither),
            Err(ClosedFormError::NonPositive(_))
        ));
        assert!(matches!(
            TestFnSpec::new([None, None], [rint(0), rint(3)], 1.0, TestFnVariant::Neither),
            Err(ClosedFormError::NonPositive(_))
        ));
    }

    #[test]
    fn full_membership_reports_all_failures() {
        let spec = TestFnSpec::both([rint(1), rint(1)], [rint(3), rint(3)], 1.0).unwrap();
        let spaces = spaces_with_p(pair(2));
        let good = FRParams::new(2, pair(1), pair(1), pair(4)).unwrap();
        assert!(full_membership(&spec, &good, &spaces).is_ok());

        // c too small kills the image decay condition
        let bad = FRParams::new(2, pair(1), pair(1), pair(1)).unwrap();
        let err = full_membership(&spec, &bad, &spaces).unwrap_err();
        assert!(err.failures.iter().any(|f| f.contains("3n/2 - 1")));
    }

    fn small_rat(num: i32, den: u8) -> Rat {
        rat(num as i64, den.max(1) as i64)
    }

    proptest! {
        // Under the necessity c-equation, image and source exponents agree
        // factor by factor, whatever the remaining parameters are.
        #[test]
        fn c_equation_forces_equal_exponents(
            a_num in -8i32..8, b_num in -8i32..8,
            l_num in -4i32..8, s_num in 1i32..12,
            alpha_num in -3i32..8, beta_num in -3i32..8,
            p_num in 5i32..16, q_num in 8i32..24,
            den in 1u8..6,
        ) {
            let n = 2usize;
            let p = small_rat(p_num, 4).max(rat(9, 8));
            let q = small_rat(q_num, 4).max(p.clone());
            let alpha = small_rat(alpha_num, den).max(rat(-3, 4));
            let beta = small_rat(beta_num, den).max(rat(-3, 4));
            let a = small_rat(a_num, den);
            let b = small_rat(b_num, den);
            let l = small_rat(l_num, den);
            let s = rint(s_num as i64);
            let c = n_rat(n) + &a + &b + (n_rat(n) + &beta) / &q - (n_rat(n) + &alpha) / &p;

            let spec = TestFnSpec::both([l.clone(), l.clone()], [s.clone(), s.clone()], 1.0).unwrap();
            let spaces = SpaceSpec::new(
                [p.clone(), p.clone()],
                [q.clone(), q.clone()],
                [alpha.clone(), alpha.clone()],
                [beta.clone(), beta.clone()],
            ).unwrap();
            let params = FRParams::new(n, [a.clone(), a.clone()], [b.clone(), b.clone()], [c.clone(), c.clone()]).unwrap();

            for f in Factor::BOTH {
                let src = testfn_exponent_formula(&spec, &spaces, n, f);
                let img = image_exponent_formula(&spec, &params, &spaces, f);
                prop_assert_eq!(src, img);
            }
        }

        // Enlarging s at fixed l never invalidates the single-pole region.
        #[test]
        fn single_pole_valid_is_monotone_in_s(
            l_num in -3i32..12, s_num in 1i32..20, bump in 1i32..10, den in 1u8..6,
        ) {
            let l = small_rat(l_num, den);
            let s = small_rat(s_num, den);
            let bigger = &s + rint(bump as i64);
            if single_pole_exponent(2, &s, &l).valid {
                prop_assert!(single_pole_exponent(2, &bigger, &l).valid);
            }
        }

        // The two reductions agree on the shared exponent calculus.
        #[test]
        fn two_pole_and_single_pole_exponents_agree(
            l_num in -3i32..8, r_num in 1i32..12, s_num in 1i32..12, den in 1u8..6,
        ) {
            let l = small_rat(l_num, den);
            let r = small_rat(r_num, den);
            let s = small_rat(s_num, den);
            let two = two_pole_exponent(2, &l, &r, &s);
            let single = single_pole_exponent(2, &(&r + &s), &l);
            if two.valid && single.valid {
                prop_assert_eq!(two.exponent.unwrap(), single.exponent.unwrap());
            }
        }
    }
}
