//! The defining relations (0)–(12) of `M_k(λ⁻¹)`, evaluated exactly.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{describe_difference, AlgebraElement, Generator};
use crate::error::{Error, Result};
use crate::scalar::{pow, Lambda};

/// A word in the generators with a scalar power of `λ` in front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub lambda_power: u32,
    pub word: Vec<Generator>,
}

fn mono(word: &[Generator]) -> Monomial {
    Monomial { lambda_power: 0, word: word.to_vec() }
}

fn scaled(p: u32, word: &[Generator]) -> Monomial {
    Monomial { lambda_power: p, word: word.to_vec() }
}

/// One instance of a relation: `lhs = rhs` at specific indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    /// Relation number, 0 through 12.
    pub relation: u8,
    pub indices: Vec<usize>,
    pub lhs: Monomial,
    pub rhs: Monomial,
}

/// Every admissible instance of the relations at width `k`. Indices that
/// would leave `1..k` are skipped.
pub fn relation_instances(k: usize) -> Vec<RelationInstance> {
    use Generator::{L, R, T};
    let mut out = Vec::new();
    let mut push = |relation: u8, indices: Vec<usize>, lhs: Monomial, rhs: Monomial| {
        out.push(RelationInstance { relation, indices, lhs, rhs });
    };
    let n = k.saturating_sub(1);
    for i in 1..=n {
        push(0, vec![i], mono(&[T(i)]), mono(&[T(i)]).adjointed());
        push(1, vec![i], mono(&[L(i), L(i)]), mono(&[L(i), L(i), L(i)]));
        if i < n {
            push(2, vec![i], mono(&[L(i), L(i + 1), L(i)]), mono(&[L(i), L(i + 1)]));
            push(2, vec![i], mono(&[L(i), L(i + 1)]), mono(&[L(i + 1), L(i), L(i + 1)]));
        }
        push(3, vec![i], mono(&[L(i), R(i), L(i)]), mono(&[L(i)]));
        if i < n {
            push(4, vec![i], mono(&[L(i + 1), R(i), L(i)]), mono(&[L(i + 1), R(i)]));
        }
        if i >= 2 {
            push(4, vec![i], mono(&[L(i), R(i), L(i - 1)]), mono(&[R(i), L(i - 1)]));
        }
        if i < n {
            push(5, vec![i], mono(&[L(i), R(i)]), mono(&[R(i + 1), L(i + 1)]));
        }
        for j in 1..=n {
            if i.abs_diff(j) >= 2 {
                let ij = vec![i, j];
                push(6, ij.clone(), mono(&[R(i), L(j)]), mono(&[L(j), R(i)]));
                push(6, ij.clone(), mono(&[L(i), L(j)]), mono(&[L(j), L(i)]));
                push(6, ij.clone(), mono(&[T(i), T(j)]), mono(&[T(j), T(i)]));
                push(6, ij.clone(), mono(&[L(i), T(j)]), mono(&[T(j), L(i)]));
                push(6, ij, mono(&[R(i), T(j)]), mono(&[T(j), R(i)]));
            }
        }
        push(7, vec![i], mono(&[T(i), T(i)]), mono(&[T(i)]));
        if i < n {
            push(8, vec![i], mono(&[T(i), T(i + 1), T(i)]), scaled(2, &[T(i)]));
            push(8, vec![i], mono(&[T(i + 1), T(i), T(i + 1)]), scaled(2, &[T(i + 1)]));
        }
        push(9, vec![i], mono(&[T(i), L(i)]), mono(&[T(i), R(i)]));
        if i < n {
            push(10, vec![i], scaled(1, &[T(i), R(i + 1)]), mono(&[T(i), T(i + 1), L(i)]));
            push(11, vec![i], mono(&[R(i), R(i + 1), T(i)]), mono(&[T(i + 1), R(i), R(i + 1)]));
        }
        push(12, vec![i], mono(&[T(i), L(i), T(i)]), scaled(1, &[T(i)]));
    }
    out
}

impl Monomial {
    /// Reverses the word and swaps `l ↔ r`; `t`, `p` and `id` are self-adjoint.
    pub fn adjointed(&self) -> Monomial {
        let word = self
            .word
            .iter()
            .rev()
            .map(|g| match *g {
                Generator::L(i) => Generator::R(i),
                Generator::R(i) => Generator::L(i),
                other => other,
            })
            .collect();
        Monomial { lambda_power: self.lambda_power, word }
    }

    /// Evaluates in `M_k(λ⁻¹)`; the relation (0) right-hand side uses the
    /// element adjoint rather than the word rewrite.
    pub fn evaluate(&self, k: usize, lambda: &Lambda) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::identity(k, lambda.clone());
        for g in &self.word {
            acc = acc.mul(&AlgebraElement::generator(k, *g, lambda.clone())?)?;
        }
        Ok(acc.scale(&pow(lambda.value(), self.lambda_power)))
    }
}

/// Outcome for one relation instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationCheck {
    pub relation: u8,
    pub indices: Vec<usize>,
    pub pass: bool,
    /// Number of non-zero terms in `lhs − rhs`.
    pub difference_terms: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationReport {
    pub k: usize,
    pub lambda: Lambda,
    pub checks: Vec<RelationCheck>,
}

impl PresentationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Relations with no admissible index at this width.
    pub fn vacuous(&self) -> Vec<u8> {
        (0..=12).filter(|r| !self.checks.iter().any(|c| c.relation == *r)).collect()
    }
}

/// Evaluates every relation instance at width `k` exactly.
pub fn check_presentation(k: usize, lambda: &Lambda) -> Result<PresentationReport> {
    if !(2..=5).contains(&k) {
        return Err(Error::ResourceLimit { what: "presentation width", value: k, limit: 5 });
    }
    let mut checks = Vec::new();
    for inst in relation_instances(k) {
        let lhs = inst.lhs.evaluate(k, lambda)?;
        let rhs =
            if inst.relation == 0 { inst.lhs.evaluate(k, lambda)?.adjoint() } else { inst.rhs.evaluate(k, lambda)? };
        let diff = lhs.sub(&rhs)?;
        checks.push(RelationCheck {
            relation: inst.relation,
            indices: inst.indices,
            pass: diff.is_zero(),
            difference_terms: diff.len(),
            detail: describe_difference(&diff),
        });
    }
    Ok(PresentationReport { k, lambda: lambda.clone(), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_two_and_three() {
        for d in [3, 4] {
            let l = Lambda::from_ratio(1, d).unwrap();
            for k in 2..=3 {
                let rep = check_presentation(k, &l).unwrap();
                assert!(rep.all_pass(), "{:?}", rep.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn vacuous_relations_at_width_two() {
        let rep = check_presentation(2, &Lambda::from_ratio(1, 3).unwrap()).unwrap();
        assert_eq!(rep.vacuous(), vec![2, 4, 5, 6, 8, 10, 11]);
    }

    #[test]
    fn wrong_relation_is_detected() {
        // t1 l1 t1 = λ² t1 is false.
        let l = Lambda::from_ratio(1, 4).unwrap();
        let lhs = mono(&[Generator::T(1), Generator::L(1), Generator::T(1)]).evaluate(2, &l).unwrap();
        let rhs = scaled(2, &[Generator::T(1)]).evaluate(2, &l).unwrap();
        assert!(!lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn out_of_range_width() {
        let l = Lambda::from_ratio(1, 3).unwrap();
        assert!(check_presentation(1, &l).is_err());
        assert!(check_presentation(6, &l).is_err());
    }
}
