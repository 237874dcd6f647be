//! Base cases for the induction on the genus: the minors `N` (genus 7) and
//! `N'` (genus 10) of the stacked matrices `Y` and `Y'`.
//!
//! Both are computed directly modulo the target prime. Because the
//! determinant is a polynomial in the parameters, reducing the parameters
//! first is exact even when they collide mod the prime.

use serde::{Deserialize, Serialize};

use crate::curve::{Component, CurveFamily};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeModulus};
use crate::ideal::IdealSystem;
use crate::matrix::DenseMatrix;

pub const N_GENUS: usize = 7;
pub const N_PRIME: u64 = 5;
pub const N_EXPECTED: u64 = 4;
pub const N_PRIME_GENUS: usize = 10;
pub const N_PRIME_PRIME: u64 = 23;
pub const N_PRIME_EXPECTED: u64 = 16;

fn pair_rows(fam: &CurveFamily, rows: Vec<Box<dyn Fn(usize, usize) -> FieldElement + '_>>) -> DenseMatrix {
    let rows = rows.into_iter().map(|f| fam.pairs().map(|pr| f(pr.i, pr.j)).collect()).collect();
    DenseMatrix::from_rows(rows, fam.num_pairs()).expect("one entry per pair")
}

/// Rows `(a_{k,i}^h + a_{k,j}^h)` ordered `(k=1,h=2), (k=1,h=3), (k=2,h=2), (k=2,h=3)`.
pub fn power_sum_rows(fam: &CurveFamily) -> DenseMatrix {
    let p = fam.modulus();
    let mut rows: Vec<Box<dyn Fn(usize, usize) -> FieldElement + '_>> = Vec::new();
    for k in Component::BOTH {
        for h in 2..=3u64 {
            rows.push(Box::new(move |i, j| p.add(p.pow(fam.alpha(k, i), h), p.pow(fam.alpha(k, j), h))));
        }
    }
    pair_rows(fam, rows)
}

/// The three unit-point torsion rows `a1_i a2_j + a1_j a2_i`, `a1_i^2 a2_j + ...`, `a1_i a2_j^2 + ...`.
pub fn mixed_rows(fam: &CurveFamily) -> DenseMatrix {
    let p = fam.modulus();
    let a1 = move |i| fam.alpha(Component::First, i);
    let a2 = move |i| fam.alpha(Component::Second, i);
    let sq = move |x: FieldElement| p.mul(x, x);
    pair_rows(
        fam,
        vec![
            Box::new(move |i, j| p.add(p.mul(a1(i), a2(j)), p.mul(a1(j), a2(i)))),
            Box::new(move |i, j| p.add(p.mul(sq(a1(i)), a2(j)), p.mul(sq(a1(j)), a2(i)))),
            Box::new(move |i, j| p.add(p.mul(a1(i), sq(a2(j))), p.mul(a1(j), sq(a2(i))))),
        ],
    )
}

/// `Y`: `Z` over the four power-sum rows, `(2g + 1) x binom(g,2)`.
pub fn build_y(fam: &CurveFamily) -> DenseMatrix {
    let z = IdealSystem::build(fam).z;
    z.stack(&power_sum_rows(fam)).expect("same pair columns")
}

/// `Y'`: `Y` over the three mixed rows, `(2g + 4) x binom(g,2)`.
pub fn build_y_prime(fam: &CurveFamily) -> DenseMatrix {
    build_y(fam).stack(&mixed_rows(fam)).expect("same pair columns")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinorLabel {
    N,
    NPrime,
}

#[derive(Clone, Debug)]
pub struct MinorCase {
    pub label: MinorLabel,
    pub g: usize,
    pub prime: PrimeModulus,
    pub matrix: DenseMatrix,
    pub value: FieldElement,
}

impl MinorCase {
    /// The square leading minor of `Y` (for `N`) or `Y'` (for `N'`) of the given family.
    pub fn from_family(label: MinorLabel, fam: &CurveFamily) -> Result<MinorCase> {
        let g = fam.genus();
        let full = match label {
            MinorLabel::N => build_y(fam),
            MinorLabel::NPrime => build_y_prime(fam),
        };
        let size = full.rows();
        if size > full.cols() {
            return Err(Error::GenusOutOfRange {
                g,
                reason: format!("minor of order {size} needs at least {size} pair columns"),
            });
        }
        let matrix = full.take_first_columns(size)?;
        let value = matrix.determinant(fam.modulus())?;
        Ok(MinorCase { label, g, prime: fam.modulus(), matrix, value })
    }
}

pub fn minor_n_case(p: PrimeModulus) -> Result<MinorCase> {
    MinorCase::from_family(MinorLabel::N, &CurveFamily::reference_unchecked(N_GENUS, p)?)
}

pub fn minor_n_prime_case(p: PrimeModulus) -> Result<MinorCase> {
    MinorCase::from_family(MinorLabel::NPrime, &CurveFamily::reference_unchecked(N_PRIME_GENUS, p)?)
}

pub fn minor_n(p: PrimeModulus) -> Result<FieldElement> {
    Ok(minor_n_case(p)?.value)
}

pub fn minor_n_prime(p: PrimeModulus) -> Result<FieldElement> {
    Ok(minor_n_prime_case(p)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::PairIndex;

    #[test]
    fn n_is_four_mod_five() {
        let p = PrimeModulus::new(N_PRIME).unwrap();
        let case = minor_n_case(p).unwrap();
        assert_eq!((case.matrix.rows(), case.matrix.cols()), (15, 15));
        assert_eq!(case.value.value(), N_EXPECTED);
    }

    #[test]
    fn n_prime_is_sixteen_mod_twenty_three() {
        let p = PrimeModulus::new(N_PRIME_PRIME).unwrap();
        let case = minor_n_prime_case(p).unwrap();
        assert_eq!((case.matrix.rows(), case.matrix.cols()), (24, 24));
        assert_eq!(case.value.value(), N_PRIME_EXPECTED);
    }

    #[test]
    fn duplicated_row_kills_the_minor() {
        let p = PrimeModulus::new(N_PRIME).unwrap();
        let case = minor_n_case(p).unwrap();
        let mut idx: Vec<usize> = (0..15).collect();
        idx[14] = 3;
        assert!(case.matrix.select_rows(&idx).determinant(p).unwrap().is_zero());
    }

    #[test]
    fn y_shapes_and_entries() {
        let p = PrimeModulus::new(109).unwrap();
        let fam = CurveFamily::reference(7, p).unwrap();
        let y = build_y(&fam);
        assert_eq!((y.rows(), y.cols()), (15, 21));
        // first power-sum row sits right under Z
        assert_eq!(y.get(11, 0).value(), (9 + 144) % 109);
        assert!(y.rank(p) >= IdealSystem::build(&fam).r0);
        let fam = CurveFamily::reference(10, p).unwrap();
        assert_eq!(build_y_prime(&fam).rows(), 24);
    }

    #[test]
    fn leading_columns_are_first_three_rows_of_pairs() {
        // (1,2)..(1,7), (2,3)..(2,7), (3,4)..(3,7) are positions 0..15 for g = 7
        let listed: Vec<_> = (1..=3).flat_map(|i| (i + 1..=7).map(move |j| PairIndex::new(i, j))).collect();
        assert_eq!(listed.len(), 15);
        for (pos, pair) in listed.iter().enumerate() {
            assert_eq!(pair.position(7), pos);
        }
        let listed: Vec<_> = (1..=3).flat_map(|i| (i + 1..=10).map(move |j| PairIndex::new(i, j))).collect();
        assert_eq!(listed.len(), 24);
        for (pos, pair) in listed.iter().enumerate() {
            assert_eq!(pair.position(10), pos);
        }
    }
}
