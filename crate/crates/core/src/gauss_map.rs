//! The second Gaussian map of a binary curve, split into its non-torsion
//! part `nu = nu_1 + nu_2` and its torsion part `tau` on `ker(nu)`.
//!
//! On a quadric `s` in `I_2(K_C)` the map `nu_k` is the polynomial
//! `R_k(t) = sum_{i<j} s_ij (A_k / ((t - a_i)(t - a_j)))^2`, of actual degree
//! `2g - 6`. The torsion at a node contributes three linear forms, giving
//! `3(g + 1)` rows in total. Ranks are accumulated as
//! `r0 = rank Z`, `r1 = rank [Z; nu]`, `r2 = rank [Z; nu; tau]`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{binomial2, Component, CurveFamily, PairIndex};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeModulus};
use crate::ideal::IdealSystem;
use crate::matrix::{DenseMatrix, EchelonForm};
use crate::poly::DensePoly;

/// Squared pair polynomials `(A_k / ((t - a_i)(t - a_j)))^2`, one per pair, lexicographic.
fn squared_pair_polys(fam: &CurveFamily, k: Component) -> Vec<DensePoly> {
    fam.pairs().map(|pair| fam.phi_pair(k, pair).square()).collect()
}

#[derive(Clone, Debug)]
pub struct NuSystem {
    /// `2(2g - 5)` rows: component 1 coefficients `t^0..t^{2g-6}`, then component 2.
    pub matrix: DenseMatrix,
    pub echelon: EchelonForm,
    pub r1: usize,
}

impl NuSystem {
    pub fn rows_per_component(g: usize) -> usize {
        2 * g - 5
    }
}

pub fn build_nu_matrix(fam: &CurveFamily) -> DenseMatrix {
    let g = fam.genus();
    let n_rows = NuSystem::rows_per_component(g);
    let mut m = DenseMatrix::zeros(2 * n_rows, fam.num_pairs());
    for k in Component::BOTH {
        for (col, poly) in squared_pair_polys(fam, k).iter().enumerate() {
            for n in 0..n_rows {
                m.set(k.index() * n_rows + n, col, poly.coeff(n));
            }
        }
    }
    m
}

pub fn build_nu(ideal: &IdealSystem) -> NuSystem {
    let matrix = build_nu_matrix(&ideal.family);
    let echelon = ideal.z_echelon.stack(&matrix, ideal.family.modulus()).expect("same pair columns");
    NuSystem { r1: echelon.rank, matrix, echelon }
}

/// `R_k(t)` at full apparent degree `2g - 4` for a given `s`.
pub fn r_poly(fam: &CurveFamily, k: Component, s: &[FieldElement]) -> DensePoly {
    let p = fam.modulus();
    squared_pair_polys(fam, k)
        .iter()
        .zip(s)
        .filter(|(_, v)| !v.is_zero())
        .fold(DensePoly::zero(p), |acc, (poly, &v)| acc.add(&poly.scale(v)))
}

fn sampler(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Samples `trials` kernel vectors of `Z` and checks that `R_k` has no terms above `t^{2g-6}`.
pub fn degree_drop_check(ideal: &IdealSystem, trials: usize, seed: u64) -> bool {
    let fam = &ideal.family;
    let p = fam.modulus();
    let top = 2 * fam.genus() - 6;
    let mut rng = sampler(seed);
    (0..trials).all(|_| {
        let s = ideal.z_echelon.random_kernel_vector(p, &mut rng);
        Component::BOTH.into_iter().all(|k| r_vanishes_above(fam, k, &s, top))
    })
}

pub fn r_vanishes_above(fam: &CurveFamily, k: Component, s: &[FieldElement], top: usize) -> bool {
    r_poly(fam, k, s).degree().is_none_or(|d| d <= top)
}

/// Closed forms of the two leading coefficients of `R_k` on `ker Z`:
///
/// ```text
/// R_{2g-6} = -sum_{i<j} (a_i^2 + a_j^2) s_ij
/// R_{2g-7} = -2 e_1 R_{2g-6} - 2 sum_{i<j} (a_i^3 + a_j^3) s_ij
/// ```
///
/// Here `e_1 = sum_m a_{k,m}` is the unsigned elementary symmetric function,
/// i.e. `e_1 = -c_{k,1}`.
pub fn closed_form_leading(fam: &CurveFamily, k: Component, s: &[FieldElement]) -> (FieldElement, FieldElement) {
    let p = fam.modulus();
    let power_sum_form = |h: u64| -> FieldElement {
        p.sum(fam.pairs().zip(s).map(|(pair, &v)| {
            let w = p.add(p.pow(fam.alpha(k, pair.i), h), p.pow(fam.alpha(k, pair.j), h));
            p.mul(w, v)
        }))
    };
    let two = p.elem(2);
    let r6 = p.neg(power_sum_form(2));
    let e1 = p.neg(fam.c_coeff(k, 1));
    let r7 = p.sub(p.neg(p.mul(p.mul(two, e1), r6)), p.mul(two, power_sum_form(3)));
    (r6, r7)
}

pub fn leading_coeff_closed_forms(ideal: &IdealSystem, trials: usize, seed: u64) -> bool {
    let fam = &ideal.family;
    let p = fam.modulus();
    let g = fam.genus();
    let mut rng = sampler(seed);
    (0..trials).all(|_| {
        let s = ideal.z_echelon.random_kernel_vector(p, &mut rng);
        Component::BOTH.into_iter().all(|k| {
            let r = r_poly(fam, k, &s);
            (r.coeff(2 * g - 6), r.coeff(2 * g - 7)) == closed_form_leading(fam, k, &s)
        })
    })
}

/// Values `phi'_{k,i}(a_{k,h})` and `phi''_{k,i}(a_{k,h})`, indexed `[i-1][h-1]`.
#[derive(Clone, Debug)]
pub struct NodeDerivatives {
    pub first: Vec<Vec<FieldElement>>,
    pub second: Vec<Vec<FieldElement>>,
}

pub fn node_derivatives(fam: &CurveFamily, k: Component) -> NodeDerivatives {
    let g = fam.genus();
    let mut first = Vec::with_capacity(g);
    let mut second = Vec::with_capacity(g);
    for i in 1..=g {
        let d1 = fam.phi(k, i).derivative();
        let d2 = d1.derivative();
        first.push(fam.alphas(k).iter().map(|&a| d1.eval(a)).collect());
        second.push(fam.alphas(k).iter().map(|&a| d2.eval(a)).collect());
    }
    NodeDerivatives { first, second }
}

/// The `3(g + 1) x binom(g,2)` torsion matrix. Rows come in triples, the unit
/// point first and then the coordinate points `p_1, ..., p_g`. The entry for
/// pair `(i, j)` is the symmetrization `x_i y_j + x_j y_i` of the products
/// of the two branch terms at the node.
pub fn build_torsion(fam: &CurveFamily) -> DenseMatrix {
    let p = fam.modulus();
    let g = fam.genus();
    let pairs: Vec<PairIndex> = fam.pairs().collect();
    let mut m = DenseMatrix::zeros(3 * (g + 1), pairs.len());
    let sym = |x: &dyn Fn(usize) -> FieldElement, y: &dyn Fn(usize) -> FieldElement, pair: PairIndex| {
        p.add(p.mul(x(pair.i), y(pair.j)), p.mul(x(pair.j), y(pair.i)))
    };

    let a1 = |i: usize| fam.alpha(Component::First, i);
    let a2 = |i: usize| fam.alpha(Component::Second, i);
    let a1sq = |i: usize| p.mul(a1(i), a1(i));
    let a2sq = |i: usize| p.mul(a2(i), a2(i));
    for (col, &pair) in pairs.iter().enumerate() {
        m.set(0, col, sym(&a1, &a2, pair));
        m.set(1, col, sym(&a1sq, &a2, pair));
        m.set(2, col, sym(&a1, &a2sq, pair));
    }

    let d1 = node_derivatives(fam, Component::First);
    let d2 = node_derivatives(fam, Component::Second);
    for h in 1..=g {
        let row = 3 * h;
        let f1 = |i: usize| d1.first[i - 1][h - 1];
        let s1 = |i: usize| d1.second[i - 1][h - 1];
        let f2 = |i: usize| d2.first[i - 1][h - 1];
        let s2 = |i: usize| d2.second[i - 1][h - 1];
        for (col, &pair) in pairs.iter().enumerate() {
            m.set(row, col, sym(&f1, &f2, pair));
            m.set(row + 1, col, sym(&s1, &f2, pair));
            m.set(row + 2, col, sym(&f1, &s2, pair));
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct TorsionSystem {
    pub matrix: DenseMatrix,
    pub echelon: EchelonForm,
    pub r2: usize,
}

pub fn build_torsion_system(fam: &CurveFamily, nu: &NuSystem) -> TorsionSystem {
    let matrix = build_torsion(fam);
    let echelon = nu.echelon.stack(&matrix, fam.modulus()).expect("same pair columns");
    TorsionSystem { r2: echelon.rank, matrix, echelon }
}

/// Ranks along the chain `Z -> [Z; nu] -> [Z; nu; tau]` with derived dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub g: usize,
    pub prime: u64,
    pub r0: usize,
    pub r1: usize,
    pub r2: usize,
    pub dim_i2: usize,
    pub dim_ker_nu: usize,
    pub rank_nu: usize,
    pub corank_nu: usize,
    pub rank_tau: usize,
    pub corank_tau: usize,
    pub nu_injective: bool,
    pub nu_surjective: bool,
    pub mu_injective: bool,
    pub mu_surjective: bool,
}

/// `dim H^0` of the non-torsion target over both components.
pub fn nu_target_dim(g: usize) -> usize {
    2 * (2 * g - 5)
}

/// Three torsion directions at each of the `g + 1` nodes.
pub fn tau_target_dim(g: usize) -> usize {
    3 * (g + 1)
}

/// `dim H^0(K^4) = 7(g - 1)` of a smooth curve of genus `g`.
pub fn mu_target_dim(g: usize) -> usize {
    7 * (g - 1)
}

impl RankReport {
    pub fn from_ranks(g: usize, prime: PrimeModulus, r0: usize, r1: usize, r2: usize) -> RankReport {
        assert_eq!(nu_target_dim(g) + tau_target_dim(g), mu_target_dim(g), "target dimension identity");
        assert!(r0 <= r1 && r1 <= r2 && r2 <= binomial2(g), "rank chain must be monotone");
        let n = binomial2(g);
        let rank_nu = r1 - r0;
        let rank_tau = r2 - r1;
        assert!(rank_nu <= nu_target_dim(g) && rank_tau <= tau_target_dim(g));
        let corank_nu = nu_target_dim(g) - rank_nu;
        let corank_tau = tau_target_dim(g) - rank_tau;
        RankReport {
            g,
            prime: prime.value(),
            r0,
            r1,
            r2,
            dim_i2: n - r0,
            dim_ker_nu: n - r1,
            rank_nu,
            corank_nu,
            rank_tau,
            corank_tau,
            nu_injective: r1 == n,
            nu_surjective: corank_nu == 0,
            mu_injective: r2 == n,
            mu_surjective: corank_nu == 0 && corank_tau == 0,
        }
    }
}

/// Refuses genera where a derivative of a degree `2g - 4` polynomial could
/// lose its leading term mod `p`.
pub fn check_derivative_degree(g: usize, p: PrimeModulus) -> Result<()> {
    if (2 * g - 4) as u64 >= p.value() {
        return Err(Error::PrimeTooSmall { p: p.value(), g });
    }
    Ok(())
}

/// Builds the whole chain for one family.
pub fn rank_report(fam: &CurveFamily) -> Result<RankReport> {
    let g = fam.genus();
    let p = fam.modulus();
    check_derivative_degree(g, p)?;
    let ideal = IdealSystem::build(fam);
    let nu = build_nu(&ideal);
    let tau = build_torsion_system(fam, &nu);
    Ok(RankReport::from_ranks(g, p, ideal.r0, nu.r1, tau.r2))
}

/// Ranks recorded for the reference parameters at genus 4..=18.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedRanks {
    pub r0: usize,
    pub r1: usize,
    pub r2: usize,
}

pub fn expected_ranks(g: usize) -> Option<ExpectedRanks> {
    if !(4..=18).contains(&g) {
        return None;
    }
    let n = binomial2(g);
    Some(ExpectedRanks { r0: 2 * g - 3, r1: if g <= 10 { n } else { 6 * g - 13 }, r2: if g <= 17 { n } else { 152 } })
}

/// Maximal rank predicts injectivity exactly when `dim I_2 <= dim H^0(K^4)`.
pub fn expect_mu_injective(g: usize) -> bool {
    binomial2(g - 2) <= mu_target_dim(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::build_z;

    fn p109() -> PrimeModulus {
        PrimeModulus::new(109).unwrap()
    }

    #[test]
    fn nu_ranks_for_reference_family() {
        let p = p109();
        let sys = build_z(&CurveFamily::reference(4, p).unwrap());
        let nu = build_nu(&sys);
        assert_eq!((nu.matrix.rows(), nu.matrix.cols()), (6, 6));
        assert_eq!(nu.r1, 6);

        let sys = build_z(&CurveFamily::reference(11, p).unwrap());
        let nu = build_nu(&sys);
        assert_eq!(nu.r1, 53);
        assert_eq!(nu.r1 - sys.r0, 34);
    }

    #[test]
    fn degree_drop_on_small_genus() {
        let p = p109();
        let fam = CurveFamily::reference(4, p).unwrap();
        let sys = build_z(&fam);
        assert!(degree_drop_check(&sys, 5, 1));
        let zero = vec![p.zero(); fam.num_pairs()];
        for k in Component::BOTH {
            assert!(r_poly(&fam, k, &zero).is_zero());
            assert_eq!(closed_form_leading(&fam, k, &zero), (p.zero(), p.zero()));
        }
        // a vector outside the kernel keeps R_k at degree 2g - 4
        let mut e = zero.clone();
        e[0] = p.one();
        assert_eq!(r_poly(&fam, Component::First, &e).degree(), Some(4));
    }

    #[test]
    fn closed_forms_on_reference_genus_seven() {
        let sys = build_z(&CurveFamily::reference(7, p109()).unwrap());
        assert!(leading_coeff_closed_forms(&sys, 5, 2));
    }

    #[test]
    fn closed_form_needs_unsigned_e1() {
        // with the signed coefficient c_1 in place of e_1 the second identity fails
        let p = p109();
        let fam = CurveFamily::reference(7, p).unwrap();
        let sys = build_z(&fam);
        let mut rng = sampler(4);
        let s = sys.z_echelon.random_kernel_vector(p, &mut rng);
        let k = Component::First;
        let (r6, r7) = closed_form_leading(&fam, k, &s);
        let two_c1_r6 = p.mul(p.mul(p.elem(2), fam.c_coeff(k, 1)), r6);
        // r7 = 2 c_1 r6 - 2 w3, so the signed reading is r7 - 4 c_1 r6
        let signed_reading = p.sub(r7, p.add(two_c1_r6, two_c1_r6));
        let actual = r_poly(&fam, k, &s).coeff(2 * 7 - 7);
        assert_eq!(actual, r7);
        assert!(r6.is_zero() || fam.c_coeff(k, 1).is_zero() || actual != signed_reading);
    }

    #[test]
    fn torsion_shape_and_unit_entry() {
        let p = p109();
        let fam = CurveFamily::reference(4, p).unwrap();
        let t = build_torsion(&fam);
        assert_eq!((t.rows(), t.cols()), (15, 6));
        assert_eq!(t.get(0, 0).value(), (3 * 18 + 12 * 6) % 109);
        assert_eq!(t.get(0, 0).value(), 17);
    }

    #[test]
    fn node_derivatives_match_product_rule_expansion() {
        let p = PrimeModulus::new(10007).unwrap();
        let fam = CurveFamily::random(7, p, 5).unwrap();
        let g = fam.genus();
        for k in Component::BOTH {
            let d = node_derivatives(&fam, k);
            for i in 1..=g {
                for h in 1..=g {
                    let x = fam.alpha(k, h);
                    // phi' = sum_{m != i} prod_{l != i, m} (x - a_l)
                    let expand =
                        p.sum((1..=g).filter(|&m| m != i).map(|m| {
                            p.product((1..=g).filter(|&l| l != i && l != m).map(|l| p.sub(x, fam.alpha(k, l))))
                        }));
                    assert_eq!(d.first[i - 1][h - 1], expand);
                    // phi'' = sum over ordered pairs m != n of the remaining product
                    let second = p.sum(
                        (1..=g)
                            .filter(|&m| m != i)
                            .flat_map(|m| (1..=g).filter(move |&n| n != i && n != m).map(move |n| (m, n)))
                            .map(|(m, n)| {
                                p.product(
                                    (1..=g).filter(|&l| l != i && l != m && l != n).map(|l| p.sub(x, fam.alpha(k, l))),
                                )
                            }),
                    );
                    assert_eq!(d.second[i - 1][h - 1], second);
                }
            }
        }
    }

    #[test]
    fn report_invariants_and_verdicts() {
        let p = p109();
        let r = rank_report(&CurveFamily::reference(17, p).unwrap()).unwrap();
        assert_eq!(r.r2, 136);
        assert!(r.mu_injective);
        let r = rank_report(&CurveFamily::reference(18, p).unwrap()).unwrap();
        assert_eq!((r.r2, r.rank_tau), (152, 57));
        assert!(r.mu_surjective && !r.mu_injective);
        let r = rank_report(&CurveFamily::reference(11, p).unwrap()).unwrap();
        assert_eq!(r.rank_tau, 2);
    }

    #[test]
    fn maximal_rank_threshold_flips_at_eighteen() {
        for g in 4..=40 {
            assert_eq!(expect_mu_injective(g), g <= 17, "g = {g}");
            assert_eq!(nu_target_dim(g) + tau_target_dim(g), mu_target_dim(g));
        }
    }

    #[test]
    fn small_prime_is_refused() {
        let p = PrimeModulus::new(11).unwrap();
        let fam = CurveFamily::random(8, p, 0).unwrap();
        assert!(matches!(rank_report(&fam), Err(Error::PrimeTooSmall { .. })));
    }
}
