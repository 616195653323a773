//! Exact predicates for the boundedness conditions, one verdict per
//! theorem-shaped condition set, with per-clause diagnostics.
//!
//! Each condition set pairs an exponent-range hypothesis (a gate) with a
//! list of strict inequalities and exact equalities in the parameters.
//! Gate violations are errors, not false verdicts: a condition set says
//! nothing outside its hypotheses, and conflating the two would corrupt
//! the necessity/sufficiency inclusion properties.
//!
//! The four exponent shapes are: both source exponents above 1
//! (`Necessity`/`Sufficiency`), first factor at 1 (`FirstL1*`), second
//! factor at 1 (`SecondL1*`), and both at 1 (`BothL1*`). Necessity-flavor
//! sets are what boundedness of the holomorphic operator forces;
//! sufficiency-flavor sets additionally demand `c_i > 3n/2` and grant
//! boundedness of the modulus operator.

use crate::kernels::{FRParams, Factor, SpaceSpec};
use crate::ratio::{format_rat, rat, rint, serde_rat, Rat};
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConditionsError {
    #[error("exponent range hypothesis violated: {0}")]
    RangeGate(String),
}

/// Identifier of one condition set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// Both source exponents above 1; conditions forced by boundedness.
    Necessity,
    /// Both source exponents above 1; conditions granting boundedness.
    Sufficiency,
    FirstL1Necessity,
    FirstL1Sufficiency,
    SecondL1Necessity,
    SecondL1Sufficiency,
    BothL1Necessity,
    BothL1Sufficiency,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::Necessity,
        TheoremId::Sufficiency,
        TheoremId::FirstL1Necessity,
        TheoremId::FirstL1Sufficiency,
        TheoremId::SecondL1Necessity,
        TheoremId::SecondL1Sufficiency,
        TheoremId::BothL1Necessity,
        TheoremId::BothL1Sufficiency,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Necessity => "necessity",
            TheoremId::Sufficiency => "sufficiency",
            TheoremId::FirstL1Necessity => "first-l1-necessity",
            TheoremId::FirstL1Sufficiency => "first-l1-sufficiency",
            TheoremId::SecondL1Necessity => "second-l1-necessity",
            TheoremId::SecondL1Sufficiency => "second-l1-sufficiency",
            TheoremId::BothL1Necessity => "both-l1-necessity",
            TheoremId::BothL1Sufficiency => "both-l1-sufficiency",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        TheoremId::ALL.into_iter().find(|id| id.as_str() == s)
    }
}

/// One strict inequality or exact equality, with both sides evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub text: String,
    pub holds: bool,
    #[serde(with = "serde_rat")]
    pub lhs: Rat,
    #[serde(with = "serde_rat")]
    pub rhs: Rat,
}

/// A condition set evaluated on concrete parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub theorem: TheoremId,
    pub holds: bool,
    pub clauses: Vec<Clause>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TheoremVerdict {
    fn assemble(theorem: TheoremId, clauses: Vec<Clause>, notes: Vec<String>) -> Self {
        let holds = clauses.iter().all(|c| c.holds);
        Self {
            theorem,
            holds,
            clauses,
            notes,
        }
    }
}

fn n_rat(n: usize) -> Rat {
    rint(n as i64)
}

fn ineq(text: String, lhs: Rat, rhs: Rat) -> Clause {
    Clause {
        holds: lhs < rhs,
        text,
        lhs,
        rhs,
    }
}

fn eq(text: String, lhs: Rat, rhs: Rat) -> Clause {
    Clause {
        holds: lhs == rhs,
        text,
        lhs,
        rhs,
    }
}

// -q_i a_i < beta_i + 1
fn a_clause(params: &FRParams, spaces: &SpaceSpec, f: Factor) -> Clause {
    let i = f.index() + 1;
    ineq(
        format!("-q{i}*a{i} < beta{i} + 1"),
        -(spaces.q(f) * params.a(f)),
        spaces.beta(f) + Rat::one(),
    )
}

// alpha_i + 1 < p_i (b_i + 1)
fn b_clause(params: &FRParams, spaces: &SpaceSpec, f: Factor) -> Clause {
    let i = f.index() + 1;
    ineq(
        format!("alpha{i} + 1 < p{i}*(b{i} + 1)"),
        spaces.alpha(f) + Rat::one(),
        spaces.p(f) * (params.b(f) + Rat::one()),
    )
}

// c_i = n + a_i + b_i + (n+beta_i)/q_i - (n+alpha_i)/p_i
fn c_equation_two_sided(params: &FRParams, spaces: &SpaceSpec, f: Factor) -> Clause {
    let i = f.index() + 1;
    let n = n_rat(params.n);
    eq(
        format!("c{i} = n + a{i} + b{i} + (n+beta{i})/q{i} - (n+alpha{i})/p{i}"),
        params.c(f).clone(),
        &n + params.a(f) + params.b(f) + (&n + spaces.beta(f)) / spaces.q(f)
            - (&n + spaces.alpha(f)) / spaces.p(f),
    )
}

// alpha_i < b_i
fn weight_below_b_clause(params: &FRParams, spaces: &SpaceSpec, f: Factor) -> Clause {
    let i = f.index() + 1;
    ineq(
        format!("alpha{i} < b{i}"),
        spaces.alpha(f).clone(),
        params.b(f).clone(),
    )
}

// c_i = a_i + b_i - alpha_i + (n+beta_i)/q_i
fn c_equation_l1(params: &FRParams, spaces: &SpaceSpec, f: Factor) -> Clause {
    let i = f.index() + 1;
    let n = n_rat(params.n);
    eq(
        format!("c{i} = a{i} + b{i} - alpha{i} + (n+beta{i})/q{i}"),
        params.c(f).clone(),
        params.a(f) + params.b(f) - spaces.alpha(f) + (&n + spaces.beta(f)) / spaces.q(f),
    )
}

// c_i > 3n/2
fn c_large_clause(params: &FRParams, f: Factor) -> Clause {
    let i = f.index() + 1;
    ineq(
        format!("c{i} > 3n/2"),
        rat(3, 2) * n_rat(params.n),
        params.c(f).clone(),
    )
}

fn q_min(spaces: &SpaceSpec) -> &Rat {
    (&spaces.q[0]).min(&spaces.q[1])
}

fn gate_two_sided(spaces: &SpaceSpec) -> Result<(), ConditionsError> {
    let p_min = (&spaces.p[0]).min(&spaces.p[1]);
    let p_max = (&spaces.p[0]).max(&spaces.p[1]);
    if *p_min <= Rat::one() {
        return Err(ConditionsError::RangeGate(format!(
            "requires 1 < p_-; got p_- = {}",
            format_rat(p_min)
        )));
    }
    if p_max > q_min(spaces) {
        return Err(ConditionsError::RangeGate(format!(
            "requires p_+ <= q_-; got p_+ = {}, q_- = {}",
            format_rat(p_max),
            format_rat(q_min(spaces))
        )));
    }
    Ok(())
}

fn gate_one_l1(spaces: &SpaceSpec, l1_factor: Factor) -> Result<(), ConditionsError> {
    let other = match l1_factor {
        Factor::First => Factor::Second,
        Factor::Second => Factor::First,
    };
    let i = l1_factor.index() + 1;
    let j = other.index() + 1;
    if !spaces.p(l1_factor).is_one() {
        return Err(ConditionsError::RangeGate(format!(
            "requires p{i} = 1; got p{i} = {}",
            format_rat(spaces.p(l1_factor))
        )));
    }
    if *spaces.p(other) <= Rat::one() {
        return Err(ConditionsError::RangeGate(format!(
            "requires 1 < p{j}; got p{j} = {}",
            format_rat(spaces.p(other))
        )));
    }
    if spaces.p(other) > q_min(spaces) {
        return Err(ConditionsError::RangeGate(format!(
            "requires p{j} <= q_-; got p{j} = {}, q_- = {}",
            format_rat(spaces.p(other)),
            format_rat(q_min(spaces))
        )));
    }
    Ok(())
}

fn gate_both_l1(spaces: &SpaceSpec) -> Result<(), ConditionsError> {
    for f in Factor::BOTH {
        if !spaces.p(f).is_one() {
            return Err(ConditionsError::RangeGate(format!(
                "requires p{} = 1; got {}",
                f.index() + 1,
                format_rat(spaces.p(f))
            )));
        }
    }
    Ok(())
}

const SUFFICIENCY_NOTE: &str = "c-equation evaluated as c_i = n + a_i + b_i + (n+beta_i)/q_i - (n+alpha_i)/p_i; the variant reading with alpha_i in place of a_i is not used";
const SECOND_L1_SUFFICIENCY_NOTE: &str = "second-factor c-equation follows the form c_2 = a_2 + b_2 - alpha_2 + (n+beta_2)/q_2; the truncated variant c_2 = a_2 + (n+beta_2)/q_2 is not used";

/// Conditions forced by boundedness on the two-sided range `1 < p <= q`.
pub fn necessary_conditions(
    params: &FRParams,
    spaces: &SpaceSpec,
) -> Result<TheoremVerdict, ConditionsError> {
    gate_two_sided(spaces)?;
    let mut clauses = Vec::new();
    for f in Factor::BOTH {
        clauses.push(a_clause(params, spaces, f));
        clauses.push(b_clause(params, spaces, f));
        clauses.push(c_equation_two_sided(params, spaces, f));
    }
    Ok(TheoremVerdict::assemble(
        TheoremId::Necessity,
        clauses,
        Vec::new(),
    ))
}

/// Conditions granting boundedness of the modulus operator on the
/// two-sided range: the necessity clauses plus `c_i > 3n/2`.
pub fn sufficient_conditions(
    params: &FRParams,
    spaces: &SpaceSpec,
) -> Result<TheoremVerdict, ConditionsError> {
    gate_two_sided(spaces)?;
    let mut clauses = Vec::new();
    for f in Factor::BOTH {
        clauses.push(a_clause(params, spaces, f));
        clauses.push(b_clause(params, spaces, f));
        clauses.push(c_equation_two_sided(params, spaces, f));
        clauses.push(c_large_clause(params, f));
    }
    Ok(TheoremVerdict::assemble(
        TheoremId::Sufficiency,
        clauses,
        vec![SUFFICIENCY_NOTE.to_string()],
    ))
}

/// Mixed conditions for `p = (1, p_2)`: the first factor carries the
/// L1-type clauses, the second the two-sided ones.
pub fn first_l1_conditions(
    params: &FRParams,
    spaces: &SpaceSpec,
    sufficiency: bool,
) -> Result<TheoremVerdict, ConditionsError> {
    gate_one_l1(spaces, Factor::First)?;
    let mut clauses = Vec::new();
    for f in Factor::BOTH {
        clauses.push(a_clause(params, spaces, f));
    }
    clauses.push(weight_below_b_clause(params, spaces, Factor::First));
    clauses.push(c_equation_l1(params, spaces, Factor::First));
    clauses.push(b_clause(params, spaces, Factor::Second));
    clauses.push(c_equation_two_sided(params, spaces, Factor::Second));
    let mut notes = Vec::new();
    if sufficiency {
        for f in Factor::BOTH {
            clauses.push(c_large_clause(params, f));
        }
        notes.push(SUFFICIENCY_NOTE.to_string());
    }
    Ok(TheoremVerdict::assemble(
        if sufficiency {
            TheoremId::FirstL1Sufficiency
        } else {
            TheoremId::FirstL1Necessity
        },
        clauses,
        notes,
    ))
}

/// Mirror image of [`first_l1_conditions`] for `p = (p_1, 1)`.
pub fn second_l1_conditions(
    params: &FRParams,
    spaces: &SpaceSpec,
    sufficiency: bool,
) -> Result<TheoremVerdict, ConditionsError> {
    gate_one_l1(spaces, Factor::Second)?;
    let mut clauses = Vec::new();
    clauses.push(b_clause(params, spaces, Factor::First));
    clauses.push(c_equation_two_sided(params, spaces, Factor::First));
    for f in Factor::BOTH {
        clauses.push(a_clause(params, spaces, f));
    }
    clauses.push(weight_below_b_clause(params, spaces, Factor::Second));
    clauses.push(c_equation_l1(params, spaces, Factor::Second));
    let mut notes = Vec::new();
    if sufficiency {
        for f in Factor::BOTH {
            clauses.push(c_large_clause(params, f));
        }
        notes.push(SUFFICIENCY_NOTE.to_string());
        notes.push(SECOND_L1_SUFFICIENCY_NOTE.to_string());
    }
    Ok(TheoremVerdict::assemble(
        if sufficiency {
            TheoremId::SecondL1Sufficiency
        } else {
            TheoremId::SecondL1Necessity
        },
        clauses,
        notes,
    ))
}

/// Conditions for `p = (1, 1)`: both factors use the L1-type clauses.
pub fn both_l1_conditions(
    params: &FRParams,
    spaces: &SpaceSpec,
    sufficiency: bool,
) -> Result<TheoremVerdict, ConditionsError> {
    gate_both_l1(spaces)?;
    let mut clauses = Vec::new();
    for f in Factor::BOTH {
        clauses.push(a_clause(params, spaces, f));
        clauses.push(weight_below_b_clause(params, spaces, f));
        clauses.push(c_equation_l1(params, spaces, f));
    }
    let notes = Vec::new();
    if sufficiency {
        for f in Factor::BOTH {
            clauses.push(c_large_clause(params, f));
        }
    }
    Ok(TheoremVerdict::assemble(
        if sufficiency {
            TheoremId::BothL1Sufficiency
        } else {
            TheoremId::BothL1Necessity
        },
        clauses,
        notes,
    ))
}

/// Evaluates one condition set by id.
pub fn evaluate(
    id: TheoremId,
    params: &FRParams,
    spaces: &SpaceSpec,
) -> Result<TheoremVerdict, ConditionsError> {
    match id {
        TheoremId::Necessity => necessary_conditions(params, spaces),
        TheoremId::Sufficiency => sufficient_conditions(params, spaces),
        TheoremId::FirstL1Necessity => first_l1_conditions(params, spaces, false),
        TheoremId::FirstL1Sufficiency => first_l1_conditions(params, spaces, true),
        TheoremId::SecondL1Necessity => second_l1_conditions(params, spaces, false),
        TheoremId::SecondL1Sufficiency => second_l1_conditions(params, spaces, true),
        TheoremId::BothL1Necessity => both_l1_conditions(params, spaces, false),
        TheoremId::BothL1Sufficiency => both_l1_conditions(params, spaces, true),
    }
}

/// The condition sets whose range gate matches the shape of `p` and `q`.
pub fn applicable(spaces: &SpaceSpec) -> Vec<TheoremId> {
    TheoremId::ALL
        .into_iter()
        .filter(|id| {
            let gate = match id {
                TheoremId::Necessity | TheoremId::Sufficiency => gate_two_sided(spaces),
                TheoremId::FirstL1Necessity | TheoremId::FirstL1Sufficiency => {
                    gate_one_l1(spaces, Factor::First)
                }
                TheoremId::SecondL1Necessity | TheoremId::SecondL1Sufficiency => {
                    gate_one_l1(spaces, Factor::Second)
                }
                TheoremId::BothL1Necessity | TheoremId::BothL1Sufficiency => gate_both_l1(spaces),
            };
            gate.is_ok()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    fn pair(v: i64) -> [Rat; 2] {
        [rint(v), rint(v)]
    }

    fn spaces(p: [Rat; 2], q: [Rat; 2], alpha: [Rat; 2], beta: [Rat; 2]) -> SpaceSpec {
        SpaceSpec::new(p, q, alpha, beta).unwrap()
    }

    fn base_spaces() -> SpaceSpec {
        spaces(pair(2), pair(2), pair(0), pair(0))
    }

    #[test]
    fn necessity_worked_example() {
        let params = FRParams::new(2, pair(0), pair(0), pair(2)).unwrap();
        let v = necessary_conditions(&params, &base_spaces()).unwrap();
        assert!(v.holds);
        assert_eq!(v.clauses.len(), 6);
        assert!(v.clauses.iter().all(|c| c.holds));
    }

    #[test]
    fn necessity_boundary_a_fails() {
        // c follows a through the equation, so only the a-clause breaks.
        let params =
            FRParams::new(2, [rat(-1, 2), rint(0)], pair(0), [rat(3, 2), rint(2)]).unwrap();
        let v = necessary_conditions(&params, &base_spaces()).unwrap();
        assert!(!v.holds);
        let failing: Vec<_> = v.clauses.iter().filter(|c| !c.holds).collect();
        assert_eq!(failing.len(), 1);
        assert_eq!(failing[0].text, "-q1*a1 < beta1 + 1");
        assert_eq!(failing[0].lhs, rint(1));
        assert_eq!(failing[0].rhs, rint(1));
    }

    #[test]
    fn necessity_perturbed_c_fails() {
        let params = FRParams::new(2, pair(0), pair(0), [rint(2), rat(5, 2)]).unwrap();
        let v = necessary_conditions(&params, &base_spaces()).unwrap();
        assert!(!v.holds);
        let failing: Vec<_> = v.clauses.iter().filter(|c| !c.holds).collect();
        assert_eq!(failing.len(), 1);
        assert!(failing[0].text.starts_with("c2 ="));
    }

    #[test]
    fn sufficiency_worked_example() {
        let params = FRParams::new(2, pair(1), pair(1), pair(4)).unwrap();
        let v = sufficient_conditions(&params, &base_spaces()).unwrap();
        assert!(v.holds, "clauses: {:?}", v.clauses);
        assert_eq!(v.clauses.len(), 8);
        assert_eq!(v.notes.len(), 1);

        // c_i = n is the necessity value but fails c_i > 3n/2
        let small_c = FRParams::new(2, pair(0), pair(0), pair(2)).unwrap();
        let v = sufficient_conditions(&small_c, &base_spaces()).unwrap();
        assert!(!v.holds);
        assert!(v
            .clauses
            .iter()
            .any(|c| c.text == "c1 > 3n/2" && !c.holds));

        // and the holding sufficiency case also passes necessity
        let v = necessary_conditions(&params, &base_spaces()).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn range_gate_errors() {
        let params = FRParams::new(2, pair(0), pair(0), pair(2)).unwrap();
        // q below p
        let bad = spaces(pair(2), pair(1), pair(0), pair(0));
        assert!(matches!(
            necessary_conditions(&params, &bad),
            Err(ConditionsError::RangeGate(_))
        ));
        // p = 1 is outside the two-sided gate
        let bad = spaces([rint(1), rint(2)], pair(2), pair(0), pair(0));
        assert!(matches!(
            sufficient_conditions(&params, &bad),
            Err(ConditionsError::RangeGate(_))
        ));
    }

    #[test]
    fn first_l1_worked_example() {
        // p = (1, 2), q = (2, 2), zero weights, a = b = (1, 1):
        // c1 = 1 + 1 - 0 + (0+2)/2 = 3, c2 = 2 + 1 + 1 + 1 - 1 = 4.
        let params = FRParams::new(2, pair(1), pair(1), [rint(3), rint(4)]).unwrap();
        let sp = spaces([rint(1), rint(2)], pair(2), pair(0), pair(0));
        let v = first_l1_conditions(&params, &sp, false).unwrap();
        assert!(v.holds, "clauses: {:?}", v.clauses);
        assert_eq!(v.clauses.len(), 6);

        // c1 = 3 = 3n/2 exactly: strict inequality kills sufficiency.
        let v = first_l1_conditions(&params, &sp, true).unwrap();
        assert!(!v.holds);
        assert!(v.clauses.iter().any(|c| c.text == "c1 > 3n/2" && !c.holds));

        // alpha1 = b1 fails the strict weight clause.
        let eq_weights = spaces([rint(1), rint(2)], pair(2), [rint(1), rint(0)], pair(0));
        let c1 = rint(1) + rint(1) - rint(1) + rint(1); // a + b - alpha + (n+beta)/q
        let params_eq = FRParams::new(2, pair(1), pair(1), [c1, rint(4)]).unwrap();
        let v = first_l1_conditions(&params_eq, &eq_weights, false).unwrap();
        assert!(!v.holds);
        assert!(v.clauses.iter().any(|c| c.text == "alpha1 < b1" && !c.holds));
    }

    #[test]
    fn second_l1_mirrors_first() {
        let params = FRParams::new(2, pair(1), pair(1), [rint(4), rint(3)]).unwrap();
        let sp = spaces([rint(2), rint(1)], pair(2), pair(0), pair(0));
        let v = second_l1_conditions(&params, &sp, false).unwrap();
        assert!(v.holds, "clauses: {:?}", v.clauses);
        assert_eq!(v.clauses.len(), 6);

        let v = second_l1_conditions(&params, &sp, true).unwrap();
        assert!(!v.holds); // c2 = 3 not > 3
        assert_eq!(v.notes.len(), 2);
    }

    #[test]
    fn both_l1_worked_example() {
        // q = (2,2), weights zero, a = (2,2), b = (1,1):
        // c_i = 2 + 1 - 0 + (0+2)/2 = 4 > 3n/2 = 3.
        let params = FRParams::new(2, pair(2), pair(1), pair(4)).unwrap();
        let sp = spaces(pair(1), pair(2), pair(0), pair(0));
        let necessity = both_l1_conditions(&params, &sp, false).unwrap();
        assert!(necessity.holds, "clauses: {:?}", necessity.clauses);
        let sufficiency = both_l1_conditions(&params, &sp, true).unwrap();
        assert!(sufficiency.holds);

        // b1 = alpha1 fails
        let sp_eq = spaces(pair(1), pair(2), [rint(1), rint(0)], pair(0));
        let v = both_l1_conditions(&params, &sp_eq, false).unwrap();
        assert!(!v.holds);

        // a1 = -1, q1 = 2, beta1 = 0: -q1 a1 = 2 not < 1
        let params_bad_a =
            FRParams::new(2, [rint(-1), rint(2)], pair(1), pair(4)).unwrap();
        let v = both_l1_conditions(&params_bad_a, &sp, false).unwrap();
        assert!(v.clauses.iter().any(|c| c.text == "-q1*a1 < beta1 + 1" && !c.holds));
    }

    #[test]
    fn verdicts_invariant_under_rational_representation() {
        let params = FRParams::new(2, pair(1), pair(1), pair(4)).unwrap();
        let same_params = FRParams::new(
            2,
            [rat(2, 2), rat(3, 3)],
            [rat(4, 4), rat(-2, -2)],
            [rat(8, 2), rat(12, 3)],
        )
        .unwrap();
        let a = sufficient_conditions(&params, &base_spaces()).unwrap();
        let b = sufficient_conditions(&same_params, &base_spaces()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn applicable_sets_follow_p_shape() {
        use TheoremId::*;
        assert_eq!(applicable(&base_spaces()), vec![Necessity, Sufficiency]);
        let first = spaces([rint(1), rint(2)], pair(2), pair(0), pair(0));
        assert_eq!(
            applicable(&first),
            vec![FirstL1Necessity, FirstL1Sufficiency]
        );
        let second = spaces([rint(2), rint(1)], pair(2), pair(0), pair(0));
        assert_eq!(
            applicable(&second),
            vec![SecondL1Necessity, SecondL1Sufficiency]
        );
        let both = spaces(pair(1), pair(2), pair(0), pair(0));
        assert_eq!(applicable(&both), vec![BothL1Necessity, BothL1Sufficiency]);
    }

    #[test]
    fn adjoint_route_reproduces_b_inequality() {
        // alpha + 1 < p(b+1) is the same inequality as -p'(b - alpha) < alpha + 1
        // evaluated through the adjoint parameters.
        use crate::kernels::adjoint_params;
        let cases = [
            (rat(3, 2), rat(1, 2), rat(0, 1)),
            (rat(5, 1), rat(-1, 4), rat(1, 3)),
            (rat(7, 3), rat(2, 1), rat(-1, 2)),
            (rat(9, 8), rat(-9, 10), rat(3, 1)),
        ];
        for (p, b, alpha) in cases {
            let direct = &alpha + Rat::one() < &p * (&b + Rat::one());
            let params = FRParams::new(2, pair(0), [b.clone(), b.clone()], pair(2)).unwrap();
            let sp = spaces(
                [p.clone(), p.clone()],
                [p.clone(), p.clone()].map(|x| x + rint(1)),
                [alpha.clone(), alpha.clone()],
                pair(0),
            );
            let (adj, adj_spaces) = adjoint_params(&params, &sp).unwrap();
            // -q*_1 a*_1 < beta*_1 + 1 with q* = p', a* = b - alpha, beta* = alpha
            let via_adjoint =
                -(adj_spaces.q(Factor::First) * adj.a(Factor::First))
                    < adj_spaces.beta(Factor::First) + Rat::one();
            assert_eq!(direct, via_adjoint, "p={p} b={b} alpha={alpha}");
        }
    }
}
