//! Linear systems cutting out the quadrics through the binary curve.
//!
//! A quadric `sum_{i<j} s_ij x_i x_j` contains `C_k` iff the linear forms
//! `Q_{k,0}, ..., Q_{k,g-2}` vanish on `s`; the matrix `U_k` has those forms
//! as rows, ordered by the degree `h` of their coefficients `q_{k,h;i,j}`.
//! Stacking `U_1` with rows `h = 1..=g-2` of `U_2` gives `Z`, whose kernel is
//! `I_2(K_C)`. The all-ones row `h = 0` is common to both curves and appears once.

use crate::curve::{binomial2, Component, CurveFamily, PairIndex};
use crate::error::Result;
use crate::field::FieldElement;
use crate::matrix::{DenseMatrix, EchelonForm};

fn rows_to_matrix(rows: Vec<Vec<FieldElement>>, cols: usize) -> DenseMatrix {
    DenseMatrix::from_rows(rows, cols).expect("rows built with one entry per pair")
}

/// `U_k`, the `(g-1) x binom(g,2)` matrix of `q_{k,h;i,j}`.
pub fn build_u(fam: &CurveFamily, k: Component) -> DenseMatrix {
    build_q_rows(fam, k, 0..=fam.genus() - 2)
}

fn build_q_rows(fam: &CurveFamily, k: Component, hs: impl Iterator<Item = usize>) -> DenseMatrix {
    let rows = hs.map(|h| fam.pairs().map(|pair| fam.q_coeff(k, h, pair)).collect()).collect();
    rows_to_matrix(rows, fam.num_pairs())
}

/// Rows `P_{k,n}`, `n = 0..=g-2`: row `n` holds `p_{k,g-2-n;i,j}`.
pub fn build_p_system(fam: &CurveFamily, k: Component) -> DenseMatrix {
    let g = fam.genus();
    let rows = (0..=g - 2).map(|n| fam.pairs().map(|pair| fam.p_coeff(k, g - 2 - n, pair)).collect()).collect();
    rows_to_matrix(rows, fam.num_pairs())
}

/// Rows `Q_{k,n}`, `n = 0..=g-2`, in the same indexing as [`build_p_system`].
pub fn build_q_system(fam: &CurveFamily, k: Component) -> DenseMatrix {
    let g = fam.genus();
    build_q_rows(fam, k, (0..=g - 2).map(|n| g - 2 - n))
}

#[derive(Clone, Debug)]
pub struct IdealSystem {
    pub family: CurveFamily,
    pub z: DenseMatrix,
    pub z_echelon: EchelonForm,
    pub r0: usize,
}

impl IdealSystem {
    pub fn build(fam: &CurveFamily) -> IdealSystem {
        let g = fam.genus();
        let u = build_u(fam, Component::First);
        let w = build_q_rows(fam, Component::Second, 1..=g - 2);
        let z = u.stack(&w).expect("U and W share the pair columns");
        let z_echelon = z.echelonize(fam.modulus());
        IdealSystem { family: fam.clone(), r0: z_echelon.rank, z, z_echelon }
    }

    pub fn genus(&self) -> usize {
        self.family.genus()
    }

    /// `binom(g,2) - r0`.
    pub fn dim_i2(&self) -> usize {
        self.family.num_pairs() - self.r0
    }

    /// Expected `dim I_2 = binom(g-2, 2)` for a general curve.
    pub fn expected_dim_i2(&self) -> usize {
        binomial2(self.genus() - 2)
    }
}

pub fn build_z(fam: &CurveFamily) -> IdealSystem {
    IdealSystem::build(fam)
}

/// Compares the minor of `U_k` on columns `(1,2), ..., (1,g)` with the
/// Vandermonde product `prod_{2<=i<j<=g} (a_j - a_i)`.
pub fn vandermonde_minor_check(fam: &CurveFamily, k: Component) -> Result<bool> {
    let p = fam.modulus();
    let g = fam.genus();
    let minor = build_u(fam, k).take_first_columns(g - 1)?.determinant(p)?;
    let vandermonde = p.product(
        (2..=g).flat_map(|i| (i + 1..=g).map(move |j| (i, j))).map(|(i, j)| p.sub(fam.alpha(k, j), fam.alpha(k, i))),
    );
    Ok(minor == vandermonde)
}

/// Checks `P_{k,n} = sum_{m=0}^{g-2-n} c_{k,m} Q_{k,n+m}` row by row, for both components.
pub fn verify_pq_identity(fam: &CurveFamily) -> bool {
    let p = fam.modulus();
    let g = fam.genus();
    Component::BOTH.into_iter().all(|k| {
        let ps = build_p_system(fam, k);
        let qs = build_q_system(fam, k);
        let c: Vec<_> = (0..=g).map(|h| fam.c_coeff(k, h)).collect();
        (0..=g - 2).all(|n| {
            let combo: Vec<FieldElement> = (0..fam.num_pairs())
                .map(|col| p.sum((0..=g - 2 - n).map(|m| p.mul(c[m], qs.get(n + m, col)))))
                .collect();
            combo == ps.row(n)
        })
    })
}

/// Scalar form of the same identity: `p_{k,h;i,j} = sum_l c_{k,l} q_{k,h-l;i,j}`.
pub fn verify_pkhij(fam: &CurveFamily) -> bool {
    let p = fam.modulus();
    let g = fam.genus();
    Component::BOTH.into_iter().all(|k| {
        let c: Vec<_> = (0..=g).map(|h| fam.c_coeff(k, h)).collect();
        fam.pairs().all(|pair| {
            (0..=g - 2).all(|h| {
                let rhs = p.sum((0..=h).map(|l| p.mul(c[l], fam.q_coeff(k, h - l, pair))));
                fam.p_coeff(k, h, pair) == rhs
            })
        })
    })
}

/// `P_k(t) = sum_{i<j} s_ij A_k / ((t - a_i)(t - a_j))` for a given `s`.
pub fn restrict_quadric(fam: &CurveFamily, k: Component, s: &[FieldElement]) -> crate::poly::DensePoly {
    let p = fam.modulus();
    fam.pairs()
        .zip(s)
        .filter(|(_, v)| !v.is_zero())
        .fold(crate::poly::DensePoly::zero(p), |acc, (pair, &v)| acc.add(&fam.phi_pair(k, pair).scale(v)))
}

/// The first `2g - 3` columns `(1,i), (2,j)` used for the nonvanishing minor of `Z`.
pub fn leading_columns(g: usize) -> Vec<PairIndex> {
    PairIndex::all(g).take(2 * g - 3).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeModulus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p109() -> PrimeModulus {
        PrimeModulus::new(109).unwrap()
    }

    #[test]
    fn u_shape_and_first_rows() {
        let fam = CurveFamily::reference(4, p109()).unwrap();
        let u = build_u(&fam, Component::First);
        assert_eq!((u.rows(), u.cols()), (3, 6));
        assert!(u.row(0).iter().all(|&v| v == p109().one()));
        assert_eq!(u.get(1, 0).value(), 3 + 12);
        assert_eq!(u.rank(p109()), 3);
    }

    #[test]
    fn z_ranks_for_reference_family() {
        let fam = CurveFamily::reference(4, p109()).unwrap();
        let sys = build_z(&fam);
        assert_eq!((sys.z.rows(), sys.z.cols()), (5, 6));
        assert_eq!(sys.r0, 5);
        assert_eq!(sys.dim_i2(), 1);

        let fam = CurveFamily::reference(18, p109()).unwrap();
        let sys = build_z(&fam);
        assert_eq!(sys.r0, 33);
        assert_eq!(sys.dim_i2(), 120);
        assert_eq!(sys.dim_i2(), sys.expected_dim_i2());
    }

    #[test]
    fn vandermonde_on_consecutive_parameters() {
        let p = p109();
        let a: Vec<_> = (0..4).map(|v| p.elem(v)).collect();
        let b: Vec<_> = (10..14).map(|v| p.elem(v)).collect();
        let fam = CurveFamily::new(p, a, b).unwrap();
        let minor = build_u(&fam, Component::First).take_first_columns(3).unwrap().determinant(p).unwrap();
        assert_eq!(minor.value(), 2);
        assert!(vandermonde_minor_check(&fam, Component::First).unwrap());
    }

    #[test]
    fn pq_identity_boundary_rows() {
        let p = p109();
        let fam = CurveFamily::reference(9, p).unwrap();
        let g = fam.genus();
        for k in Component::BOTH {
            let ps = build_p_system(&fam, k);
            let qs = build_q_system(&fam, k);
            assert_eq!(ps.row(g - 2), qs.row(g - 2));
            let c1 = fam.c_coeff(k, 1);
            let expect: Vec<_> =
                (0..fam.num_pairs()).map(|col| p.add(qs.get(g - 3, col), p.mul(c1, qs.get(g - 2, col)))).collect();
            assert_eq!(ps.row(g - 3), &expect[..]);
            // unipotent change of basis preserves rank
            assert_eq!(ps.rank(p), qs.rank(p));
        }
        assert!(verify_pq_identity(&fam));
        assert!(verify_pkhij(&fam));
    }

    #[test]
    fn kernel_quadrics_contain_both_components() {
        let p = PrimeModulus::new(10007).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [4, 6, 9] {
            let fam = CurveFamily::random(g, p, g as u64).unwrap();
            let sys = build_z(&fam);
            for _ in 0..3 {
                let s = sys.z_echelon.random_kernel_vector(p, &mut rng);
                for k in Component::BOTH {
                    assert!(restrict_quadric(&fam, k, &s).is_zero());
                }
            }
        }
    }

    #[test]
    fn leading_columns_are_first_row_then_second() {
        let cols = leading_columns(5);
        let expect: Vec<_> = [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]
            .into_iter()
            .map(|(i, j)| PairIndex::new(i, j))
            .collect();
        assert_eq!(cols, expect);
        let fam = CurveFamily::reference(5, p109()).unwrap();
        let z = build_z(&fam).z;
        assert!(!z.take_first_columns(cols.len()).unwrap().determinant(p109()).unwrap().is_zero());
    }
}
