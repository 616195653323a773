//! Kernel evaluation for the two-factor operator pair, principal-branch
//! complex powers, and the adjoint parameter transform.
//!
//! A parameter triple `(a, b, c)` defines the product kernel
//! `g(Im u)^{b_1} g(Im η)^{b_2} / (Q(z-ū)^{c_1} Q(w-η̄)^{c_2})` for the
//! holomorphic operator `T` and its modulus for `S`. Everything in the
//! theory factorizes over the two slots, so only single-factor evaluation
//! is exposed; callers multiply factors.

use crate::geometry::{q_diff, TubePoint};
use crate::ratio::{format_rat, hoelder_conjugate, serde_rat_pair, to_f64, Rat};
use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KernelError {
    #[error("complex power base {base} lies on the closed negative real axis")]
    BranchCut { base: f64 },
    #[error("complex power base is not finite")]
    NonFiniteBase,
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("space exponent {0} is outside [1, oo)")]
    ExponentOutOfRange(String),
    #[error("weight exponent {0} must exceed -1")]
    WeightOutOfRange(String),
    #[error("Hölder conjugate of {0} is infinite; the adjoint spaces need exponents above 1")]
    ConjugateUndefined(String),
}

/// One slot of the two-factor product structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    First,
    Second,
}

impl Factor {
    pub const BOTH: [Factor; 2] = [Factor::First, Factor::Second];

    pub fn index(self) -> usize {
        match self {
            Factor::First => 0,
            Factor::Second => 1,
        }
    }
}

/// The exponent triple `(a, b, c)` and dimension defining one operator pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FRParams {
    pub n: usize,
    #[serde(with = "serde_rat_pair")]
    pub a: [Rat; 2],
    #[serde(with = "serde_rat_pair")]
    pub b: [Rat; 2],
    #[serde(with = "serde_rat_pair")]
    pub c: [Rat; 2],
}

impl FRParams {
    pub fn new(n: usize, a: [Rat; 2], b: [Rat; 2], c: [Rat; 2]) -> Result<Self, KernelError> {
        if n < 2 {
            return Err(KernelError::DimensionTooSmall(n));
        }
        Ok(Self { n, a, b, c })
    }

    pub fn a(&self, f: Factor) -> &Rat {
        &self.a[f.index()]
    }

    pub fn b(&self, f: Factor) -> &Rat {
        &self.b[f.index()]
    }

    pub fn c(&self, f: Factor) -> &Rat {
        &self.c[f.index()]
    }

    /// Floating-point view for evaluation; converted once, not per point.
    pub fn kernel(&self) -> Kernel {
        Kernel {
            a: [to_f64(&self.a[0]), to_f64(&self.a[1])],
            b: [to_f64(&self.b[0]), to_f64(&self.b[1])],
            c: [to_f64(&self.c[0]), to_f64(&self.c[1])],
        }
    }

    /// Same parameters with one `c` entry replaced.
    pub fn with_c(&self, f: Factor, c: Rat) -> Self {
        let mut out = self.clone();
        out.c[f.index()] = c;
        out
    }
}

/// Mixed-norm space data: source `(p, α)`, target `(q, β)`, all exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(with = "serde_rat_pair")]
    pub p: [Rat; 2],
    #[serde(with = "serde_rat_pair")]
    pub q: [Rat; 2],
    #[serde(with = "serde_rat_pair")]
    pub alpha: [Rat; 2],
    #[serde(with = "serde_rat_pair")]
    pub beta: [Rat; 2],
}

impl SpaceSpec {
    pub fn new(
        p: [Rat; 2],
        q: [Rat; 2],
        alpha: [Rat; 2],
        beta: [Rat; 2],
    ) -> Result<Self, KernelError> {
        let minus_one = -Rat::one();
        for (name, pair) in [("p", &p), ("q", &q)] {
            for (i, e) in pair.iter().enumerate() {
                if *e < Rat::one() {
                    return Err(KernelError::ExponentOutOfRange(format!(
                        "{name}{} = {}",
                        i + 1,
                        format_rat(e)
                    )));
                }
            }
        }
        for (name, pair) in [("alpha", &alpha), ("beta", &beta)] {
            for (i, e) in pair.iter().enumerate() {
                if *e <= minus_one {
                    return Err(KernelError::WeightOutOfRange(format!(
                        "{name}{} = {}",
                        i + 1,
                        format_rat(e)
                    )));
                }
            }
        }
        Ok(Self { p, q, alpha, beta })
    }

    pub fn p(&self, f: Factor) -> &Rat {
        &self.p[f.index()]
    }

    pub fn q(&self, f: Factor) -> &Rat {
        &self.q[f.index()]
    }

    pub fn alpha(&self, f: Factor) -> &Rat {
        &self.alpha[f.index()]
    }

    pub fn beta(&self, f: Factor) -> &Rat {
        &self.beta[f.index()]
    }

    /// Hölder conjugate of `p_f`; `None` when `p_f == 1`.
    pub fn p_conj(&self, f: Factor) -> Option<Rat> {
        hoelder_conjugate(self.p(f))
    }

    /// Hölder conjugate of `q_f`; `None` when `q_f == 1`.
    pub fn q_conj(&self, f: Factor) -> Option<Rat> {
        hoelder_conjugate(self.q(f))
    }
}

/// Principal-branch complex power `exp(e · Log base)`.
///
/// Bases on the closed negative real axis are a hard error: the geometry
/// guarantees `Q(z - ū)` never lands there, so a hit means a bug upstream,
/// not a value to patch over.
pub fn cpow(base: Complex64, exponent: f64) -> Result<Complex64, KernelError> {
    if !base.re.is_finite() || !base.im.is_finite() {
        return Err(KernelError::NonFiniteBase);
    }
    if base.im == 0.0 && base.re <= 0.0 {
        return Err(KernelError::BranchCut { base: base.re });
    }
    Ok(base.powf(exponent))
}

/// Floating-point exponents of one parameter triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
}

impl Kernel {
    /// Holomorphic factor `g(Im u)^{b_f} / Q(z - ū)^{c_f}`.
    pub fn eval_t(&self, z: &TubePoint, u: &TubePoint, f: Factor) -> Result<Complex64, KernelError> {
        let i = f.index();
        let g = u.im().g();
        let q = q_diff(z, u);
        Ok(g.powf(self.b[i]) * cpow(q, -self.c[i])?)
    }

    /// Modulus factor `g(Im u)^{b_f} / |Q(z - ū)|^{c_f}`, always positive.
    pub fn eval_s(&self, z: &TubePoint, u: &TubePoint, f: Factor) -> f64 {
        let i = f.index();
        let g = u.im().g();
        let q = q_diff(z, u).norm();
        g.powf(self.b[i]) * q.powf(-self.c[i])
    }
}

/// Single-factor kernel of `T` at `(z, u)`.
pub fn kernel_t(
    z: &TubePoint,
    u: &TubePoint,
    f: Factor,
    params: &FRParams,
) -> Result<Complex64, KernelError> {
    params.kernel().eval_t(z, u, f)
}

/// Single-factor kernel of `S` at `(z, u)`.
pub fn kernel_s(z: &TubePoint, u: &TubePoint, f: Factor, params: &FRParams) -> f64 {
    params.kernel().eval_s(z, u, f)
}

/// Parameters and spaces of the adjoint operator.
///
/// The adjoint has exponents `a* = b - α`, `b* = a + β`, `c* = c` and acts
/// between the conjugate spaces with the weights swapped: source `(q', β)`,
/// target `(p', α)`. Requires every exponent above 1 so the conjugates stay
/// finite.
pub fn adjoint_params(
    params: &FRParams,
    spaces: &SpaceSpec,
) -> Result<(FRParams, SpaceSpec), KernelError> {
    let conj = |name: &str, e: &Rat| {
        hoelder_conjugate(e).ok_or_else(|| KernelError::ConjugateUndefined(name.to_string()))
    };
    let p_star = [conj("q1", &spaces.q[0])?, conj("q2", &spaces.q[1])?];
    let q_star = [conj("p1", &spaces.p[0])?, conj("p2", &spaces.p[1])?];
    let a_star = [
        &params.b[0] - &spaces.alpha[0],
        &params.b[1] - &spaces.alpha[1],
    ];
    let b_star = [
        &params.a[0] + &spaces.beta[0],
        &params.a[1] + &spaces.beta[1],
    ];
    let adj = FRParams::new(params.n, a_star, b_star, params.c.clone())?;
    let adj_spaces = SpaceSpec::new(
        p_star,
        q_star,
        spaces.beta.clone(),
        spaces.alpha.clone(),
    )?;
    Ok((adj, adj_spaces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TubePoint;
    use crate::ratio::{rat, rint};
    use crate::sampling::sample_tube;

    fn pair(v: i64) -> [Rat; 2] {
        [rint(v), rint(v)]
    }

    fn params(a: i64, b: i64, c: i64) -> FRParams {
        FRParams::new(2, pair(a), pair(b), pair(c)).unwrap()
    }

    #[test]
    fn cpow_examples() {
        let r = cpow(Complex64::new(2.0, 0.0), 0.5).unwrap();
        assert!((r.re - 2.0f64.sqrt()).abs() < 1e-15 && r.im == 0.0);
        let r = cpow(Complex64::new(1.0, 0.0), -7.31).unwrap();
        assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            cpow(Complex64::new(-4.0, 0.0), 0.5),
            Err(KernelError::BranchCut { .. })
        ));
        assert!(matches!(
            cpow(Complex64::new(0.0, 0.0), 0.5),
            Err(KernelError::BranchCut { .. })
        ));
    }

    #[test]
    fn kernel_t_examples() {
        let z = TubePoint::on_axis(2, 1.0).unwrap();
        let quarter = kernel_t(&z, &z, Factor::First, &params(0, 0, 1)).unwrap();
        assert!((quarter - Complex64::new(0.25, 0.0)).norm() < 1e-14);

        let one = kernel_t(&z, &z, Factor::First, &params(0, 0, 0)).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let u = TubePoint::on_axis(2, 2.0).unwrap();
        let v = kernel_t(&z, &u, Factor::First, &params(0, 1, 2)).unwrap();
        assert!((v - Complex64::new(4.0 / 81.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn kernel_s_matches_kernel_t_modulus() {
        let batch = sample_tube(2, 1.0, 64, 1234).unwrap();
        let p = params(1, 2, 3);
        for zu in batch.points.chunks_exact(2) {
            for f in Factor::BOTH {
                let t = kernel_t(&zu[0], &zu[1], f, &p).unwrap();
                let s = kernel_s(&zu[0], &zu[1], f, &p);
                assert!((t.norm() - s).abs() <= 1e-12 * s.max(1e-300));
            }
        }
    }

    #[test]
    fn kernel_s_is_two_homogeneous_in_b_minus_c() {
        let p = params(0, 2, 3);
        let z = TubePoint::new(vec![0.5, -0.2], crate::geometry::ConePoint::new(vec![0.1, 1.0]).unwrap()).unwrap();
        let u = TubePoint::new(vec![-1.0, 0.7], crate::geometry::ConePoint::new(vec![-0.4, 2.0]).unwrap()).unwrap();
        let base = kernel_s(&z, &u, Factor::First, &p);
        for delta in [0.5, 2.0, 5.0] {
            let zs = z.scaled(delta).unwrap();
            let us = u.scaled(delta).unwrap();
            let scaled = kernel_s(&zs, &us, Factor::First, &p);
            let predicted = delta.powf(2.0 * (2.0 - 3.0)) * base;
            assert!((scaled - predicted).abs() <= 1e-10 * predicted.abs());
        }
    }

    #[test]
    fn branch_stays_clear_on_random_pairs() {
        // Q(z - ū) must keep its argument away from ±π across the tube.
        let batch = sample_tube(2, 1.0, 200_000, 99).unwrap();
        let batch3 = sample_tube(3, 1.0, 100_000, 101).unwrap();
        for points in [&batch.points, &batch3.points] {
            for zu in points.chunks_exact(2) {
                let q = q_diff(&zu[0], &zu[1]);
                assert!(q.arg().abs() < std::f64::consts::PI - 1e-9);
            }
        }
    }

    #[test]
    fn adjoint_parameter_transform() {
        let spaces = SpaceSpec::new(pair(2), pair(2), pair(0), pair(0)).unwrap();
        let (adj, adj_spaces) = adjoint_params(&params(1, 1, 4), &spaces).unwrap();
        assert_eq!(adj.a, pair(1));
        assert_eq!(adj.b, pair(1));
        assert_eq!(adj.c, pair(4));
        assert_eq!(adj_spaces.p, pair(2));
        assert_eq!(adj_spaces.q, pair(2));

        let (zero, _) = adjoint_params(&params(0, 0, 0), &spaces).unwrap();
        assert_eq!(zero.a, pair(0));
        assert_eq!(zero.b, pair(0));
    }

    #[test]
    fn adjoint_is_an_involution() {
        let p = FRParams::new(
            2,
            [rat(1, 2), rat(-1, 3)],
            [rat(5, 4), rat(2, 1)],
            [rat(7, 2), rat(4, 1)],
        )
        .unwrap();
        let spaces = SpaceSpec::new(
            [rat(3, 2), rat(5, 2)],
            [rat(3, 1), rat(4, 1)],
            [rat(1, 4), rat(-1, 2)],
            [rat(0, 1), rat(3, 4)],
        )
        .unwrap();
        let (adj, adj_spaces) = adjoint_params(&p, &spaces).unwrap();
        let (back, back_spaces) = adjoint_params(&adj, &adj_spaces).unwrap();
        assert_eq!(back.a, p.a);
        assert_eq!(back.b, p.b);
        assert_eq!(back.c, p.c);
        assert_eq!(back_spaces, spaces);
    }

    #[test]
    fn adjoint_rejects_unit_exponents() {
        let spaces = SpaceSpec::new([rint(1), rint(2)], pair(2), pair(0), pair(0)).unwrap();
        assert!(matches!(
            adjoint_params(&params(1, 1, 4), &spaces),
            Err(KernelError::ConjugateUndefined(_))
        ));
    }

    #[test]
    fn space_spec_validates_ranges() {
        assert!(SpaceSpec::new(pair(0), pair(2), pair(0), pair(0)).is_err());
        assert!(SpaceSpec::new(pair(2), pair(2), [rint(-1), rint(0)], pair(0)).is_err());
        assert!(SpaceSpec::new([rat(1, 1), rat(3, 2)], pair(2), pair(0), pair(0)).is_ok());
    }
}
