//! Binary curves `C1 ∪ C2` given by two lists of node parameters.
//!
//! Component `k` is parametrized as `t -> [1/(t - a_{k,1}), ..., 1/(t - a_{k,g})]`,
//! so `a_{k,h}` is the parameter of the coordinate point `p_h` on `C_k` and
//! `t = ∞` maps to the unit point. Everything here is computed on demand
//! from [`DensePoly::from_roots`].

use std::fmt;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeModulus};
use crate::poly::DensePoly;

pub const MIN_GENUS: usize = 4;

/// Node parameters hard-coded for the reference computation, 18 per component.
pub const REFERENCE_ALPHA_1: [u64; 18] = [3, 12, 21, 29, 37, 41, 43, 46, 54, 62, 65, 72, 81, 85, 89, 94, 97, 105];
pub const REFERENCE_ALPHA_2: [u64; 18] = [6, 18, 24, 36, 39, 42, 45, 52, 60, 63, 71, 80, 84, 86, 91, 96, 104, 108];
pub const REFERENCE_MAX_GENUS: usize = 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    First,
    Second,
}

impl Component {
    pub const BOTH: [Component; 2] = [Component::First, Component::Second];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Component::First => 0,
            Component::Second => 1,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.index() + 1)
    }
}

/// The pair `(i, j)` with `1 <= i < j <= g`, one per unknown `s_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairIndex {
    pub i: usize,
    pub j: usize,
}

impl PairIndex {
    pub fn new(i: usize, j: usize) -> Self {
        debug_assert!(1 <= i && i < j);
        PairIndex { i, j }
    }

    /// Lexicographic position among all pairs for genus `g`.
    pub fn position(self, g: usize) -> usize {
        // rows i' < i contribute (g - i') pairs each
        let before: usize = (1..self.i).map(|r| g - r).sum();
        before + (self.j - self.i - 1)
    }

    pub fn from_position(g: usize, mut pos: usize) -> Option<Self> {
        for i in 1..g {
            let row = g - i;
            if pos < row {
                return Some(PairIndex::new(i, i + 1 + pos));
            }
            pos -= row;
        }
        None
    }

    /// All pairs for genus `g` in lexicographic order.
    pub fn all(g: usize) -> impl Iterator<Item = PairIndex> {
        (1..=g).flat_map(move |i| (i + 1..=g).map(move |j| PairIndex::new(i, j)))
    }

    /// Zero-based `(i - 1, j - 1)`.
    #[inline]
    pub fn zero_based(self) -> (usize, usize) {
        (self.i - 1, self.j - 1)
    }
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

pub fn binomial2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveFamily {
    g: usize,
    alpha: [Vec<FieldElement>; 2],
    p: PrimeModulus,
}

impl CurveFamily {
    /// Validates genus and within-list distinctness.
    pub fn new(p: PrimeModulus, alpha1: Vec<FieldElement>, alpha2: Vec<FieldElement>) -> Result<Self> {
        let fam = Self::new_unchecked(p, alpha1, alpha2)?;
        for k in Component::BOTH {
            if let Some((a, b)) = first_repeat(fam.alphas(k)) {
                return Err(Error::InvalidModulus {
                    p: p.value(),
                    reason: format!(
                        "parameters {} and {} of component {k} coincide mod {p} (value {})",
                        a + 1,
                        b + 1,
                        fam.alphas(k)[a]
                    ),
                });
            }
        }
        Ok(fam)
    }

    /// Only checks lengths and genus. Used for the determinant computations,
    /// which are polynomial identities in the parameters and stay meaningful
    /// when the parameters collide modulo a small prime.
    pub fn new_unchecked(p: PrimeModulus, alpha1: Vec<FieldElement>, alpha2: Vec<FieldElement>) -> Result<Self> {
        let g = alpha1.len();
        if alpha2.len() != g {
            return Err(Error::Dimension(format!("parameter lists have lengths {g} and {}", alpha2.len())));
        }
        if g < MIN_GENUS {
            return Err(Error::GenusOutOfRange { g, reason: format!("genus must be at least {MIN_GENUS}") });
        }
        Ok(CurveFamily { g, alpha: [alpha1, alpha2], p })
    }

    pub fn reference(g: usize, p: PrimeModulus) -> Result<Self> {
        let (a1, a2) = reference_lists(g, p)?;
        Self::new(p, a1, a2)
    }

    /// The reference parameters reduced mod `p` without the distinctness check.
    pub fn reference_unchecked(g: usize, p: PrimeModulus) -> Result<Self> {
        let (a1, a2) = reference_lists(g, p)?;
        Self::new_unchecked(p, a1, a2)
    }

    /// Two lists of `g` distinct residues each, drawn from a ChaCha stream seeded by `seed`.
    pub fn random(g: usize, p: PrimeModulus, seed: u64) -> Result<Self> {
        if p.value() <= g as u64 {
            return Err(Error::InvalidModulus {
                p: p.value(),
                reason: format!("need more than {g} residues to draw {g} distinct parameters"),
            });
        }
        if g < MIN_GENUS {
            return Err(Error::GenusOutOfRange { g, reason: format!("genus must be at least {MIN_GENUS}") });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = usize::try_from(p.value()).expect("modulus fits in usize");
        let mut draw =
            || -> Vec<FieldElement> { sample(&mut rng, n, g).into_iter().map(|v| p.elem(v as u64)).collect() };
        let a1 = draw();
        let a2 = draw();
        Self::new(p, a1, a2)
    }

    /// Parses `g` on the first line, then one line of `g` integers per component.
    pub fn parse(text: &str, p: PrimeModulus) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let g: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty family file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("genus line: {e}")))?;
        let mut read_list = |which: usize| -> Result<Vec<FieldElement>> {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing parameter line {which}")))?;
            let vals = line
                .split_whitespace()
                .map(|tok| tok.parse::<i64>().map(|v| p.elem_i64(v)))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("parameter line {which}: {e}")))?;
            if vals.len() != g {
                return Err(Error::Parse(format!("parameter line {which} has {} values, expected {g}", vals.len())));
            }
            Ok(vals)
        };
        let a1 = read_list(1)?;
        let a2 = read_list(2)?;
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after the second parameter line".into()));
        }
        Self::new(p, a1, a2)
    }

    pub fn load(path: &Path, p: PrimeModulus) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, p)
    }

    pub fn to_text(&self) -> String {
        let line = |k: Component| self.alphas(k).iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
        format!("{}\n{}\n{}\n", self.g, line(Component::First), line(Component::Second))
    }

    #[inline]
    pub fn genus(&self) -> usize {
        self.g
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline]
    pub fn alphas(&self, k: Component) -> &[FieldElement] {
        &self.alpha[k.index()]
    }

    /// `a_{k,i}` with 1-based `i`.
    #[inline]
    pub fn alpha(&self, k: Component, i: usize) -> FieldElement {
        self.alpha[k.index()][i - 1]
    }

    pub fn num_pairs(&self) -> usize {
        binomial2(self.g)
    }

    pub fn pairs(&self) -> impl Iterator<Item = PairIndex> {
        PairIndex::all(self.g)
    }

    /// Positions `(i, j)` (1-based) where a parameter of `C1` equals one of `C2`.
    pub fn cross_collisions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.alpha[0].iter().enumerate() {
            for (j, b) in self.alpha[1].iter().enumerate() {
                if a == b {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    /// `A_k(t) = prod_i (t - a_{k,i})`.
    pub fn a_poly(&self, k: Component) -> DensePoly {
        DensePoly::from_roots(self.p, self.alphas(k))
    }

    /// `A_k(t) / (t - a_{k,i})`, built from the remaining roots.
    pub fn phi(&self, k: Component, i: usize) -> DensePoly {
        let roots: Vec<_> = self.alphas(k).iter().enumerate().filter(|&(m, _)| m + 1 != i).map(|(_, &a)| a).collect();
        DensePoly::from_roots(self.p, &roots)
    }

    /// `A_k(t) / ((t - a_{k,i})(t - a_{k,j}))`, built from the remaining roots.
    pub fn phi_pair(&self, k: Component, pair: PairIndex) -> DensePoly {
        let roots: Vec<_> = self
            .alphas(k)
            .iter()
            .enumerate()
            .filter(|&(m, _)| m + 1 != pair.i && m + 1 != pair.j)
            .map(|(_, &a)| a)
            .collect();
        DensePoly::from_roots(self.p, &roots)
    }

    /// `c_{k,h}`: coefficient of `t^{g-h}` in `A_k`.
    pub fn c_coeff(&self, k: Component, h: usize) -> FieldElement {
        assert!(h <= self.g, "h = {h} exceeds genus {}", self.g);
        self.a_poly(k).coeff(self.g - h)
    }

    /// `q_{k,h;i,j} = sum_{m=0}^{h} a_i^m a_j^{h-m}`.
    pub fn q_coeff(&self, k: Component, h: usize, pair: PairIndex) -> FieldElement {
        let p = self.p;
        let powers = |a: FieldElement| {
            std::iter::successors(Some(p.one()), move |&x| Some(p.mul(x, a))).take(h + 1).collect::<Vec<_>>()
        };
        let (pi, pj) = (powers(self.alpha(k, pair.i)), powers(self.alpha(k, pair.j)));
        p.sum((0..=h).map(|m| p.mul(pi[m], pj[h - m])))
    }

    /// `p_{k,h;i,j}`: coefficient of `t^{g-2-h}` in `A_k / ((t - a_i)(t - a_j))`.
    pub fn p_coeff(&self, k: Component, h: usize, pair: PairIndex) -> FieldElement {
        assert!(h + 2 <= self.g, "h = {h} exceeds g - 2");
        self.phi_pair(k, pair).coeff(self.g - 2 - h)
    }
}

/// Both recurrences for `q_{k,h;i,j}`, for every pair and both components:
/// `q_h = q_1 q_{h-1} - a_i a_j q_{h-2}` and `q_h = a_i q_{h-1} + a_j^h`.
pub fn verify_q_recurrences(fam: &CurveFamily) -> bool {
    let p = fam.modulus();
    let g = fam.genus();
    Component::BOTH.into_iter().all(|k| {
        fam.pairs().all(|pair| {
            let (ai, aj) = (fam.alpha(k, pair.i), fam.alpha(k, pair.j));
            let q: Vec<_> = (0..=g - 2).map(|h| fam.q_coeff(k, h, pair)).collect();
            let base = q[0] == p.one() && q[1] == p.add(ai, aj);
            let three_term = (2..=g - 2).all(|h| q[h] == p.sub(p.mul(q[1], q[h - 1]), p.mul(p.mul(ai, aj), q[h - 2])));
            let two_term = (1..=g - 2).all(|h| q[h] == p.add(p.mul(ai, q[h - 1]), p.pow(aj, h as u64)));
            base && three_term && two_term
        })
    })
}

fn reference_lists(g: usize, p: PrimeModulus) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
    if !(MIN_GENUS..=REFERENCE_MAX_GENUS).contains(&g) {
        return Err(Error::GenusOutOfRange {
            g,
            reason: format!("reference parameters cover genus {MIN_GENUS}..={REFERENCE_MAX_GENUS}"),
        });
    }
    let take = |list: &[u64]| list[..g].iter().map(|&a| p.elem(a)).collect();
    Ok((take(&REFERENCE_ALPHA_1), take(&REFERENCE_ALPHA_2)))
}

fn first_repeat(v: &[FieldElement]) -> Option<(usize, usize)> {
    for b in 1..v.len() {
        if let Some(a) = v[..b].iter().position(|&x| x == v[b]) {
            return Some((a, b));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p109() -> PrimeModulus {
        PrimeModulus::new(109).unwrap()
    }

    fn values(v: &[FieldElement]) -> Vec<u64> {
        v.iter().map(|a| a.value()).collect()
    }

    #[test]
    fn reference_family_truncates() {
        let fam = CurveFamily::reference(4, p109()).unwrap();
        assert_eq!(values(fam.alphas(Component::First)), vec![3, 12, 21, 29]);
        assert_eq!(values(fam.alphas(Component::Second)), vec![6, 18, 24, 36]);

        let fam = CurveFamily::reference(18, p109()).unwrap();
        assert_eq!(values(fam.alphas(Component::First)), REFERENCE_ALPHA_1.to_vec());
        assert!(fam.cross_collisions().is_empty());
    }

    #[test]
    fn reference_family_genus_range() {
        assert!(matches!(CurveFamily::reference(3, p109()), Err(Error::GenusOutOfRange { .. })));
        assert!(matches!(CurveFamily::reference(19, p109()), Err(Error::GenusOutOfRange { .. })));
    }

    #[test]
    fn reference_family_collides_mod_five() {
        let p5 = PrimeModulus::new(5).unwrap();
        let reduced: Vec<u64> = REFERENCE_ALPHA_1[..7].iter().map(|a| a % 5).collect();
        assert_eq!(reduced, vec![3, 2, 1, 4, 2, 1, 3]);
        assert!(matches!(CurveFamily::reference(7, p5), Err(Error::InvalidModulus { p: 5, .. })));
        assert!(CurveFamily::reference_unchecked(7, p5).is_ok());

        let p3 = PrimeModulus::new(3).unwrap();
        assert!(matches!(CurveFamily::reference(4, p3), Err(Error::InvalidModulus { p: 3, .. })));
    }

    #[test]
    fn random_family_is_deterministic() {
        let p = p109();
        let a = CurveFamily::random(5, p, 11).unwrap();
        let b = CurveFamily::random(5, p, 11).unwrap();
        assert_eq!(a, b);
        for k in Component::BOTH {
            let mut v = values(a.alphas(k));
            v.sort_unstable();
            v.dedup();
            assert_eq!(v.len(), 5);
        }
        assert_ne!(a, CurveFamily::random(5, p, 12).unwrap());
        let p5 = PrimeModulus::new(5).unwrap();
        assert!(matches!(CurveFamily::random(5, p5, 0), Err(Error::InvalidModulus { .. })));
    }

    #[test]
    fn parse_family_file() {
        let p = p109();
        let fam = CurveFamily::parse("4\n3 12 21 29\n 6 18 24 36 \n", p).unwrap();
        assert_eq!(fam, CurveFamily::reference(4, p).unwrap());
        assert_eq!(CurveFamily::parse(&fam.to_text(), p).unwrap(), fam);
        assert!(matches!(CurveFamily::parse("4\n1 2 3\n4 5 6 7\n", p), Err(Error::Parse(_))));
        assert!(matches!(CurveFamily::parse("x\n", p), Err(Error::Parse(_))));
        assert!(matches!(CurveFamily::parse("4\n1 2 3 3\n4 5 6 7\n", p), Err(Error::InvalidModulus { .. })));
        // cross-list collisions are allowed
        let fam = CurveFamily::parse("4\n1 2 3 4\n4 5 6 7\n", p).unwrap();
        assert_eq!(fam.cross_collisions(), vec![(4, 1)]);
    }

    #[test]
    fn q_coeff_examples() {
        let p = p109();
        let fam =
            CurveFamily::new(p, [2, 3, 5, 7].map(|v| p.elem(v)).to_vec(), [1, 4, 6, 8].map(|v| p.elem(v)).to_vec())
                .unwrap();
        let pair = PairIndex::new(1, 2);
        assert_eq!(fam.q_coeff(Component::First, 0, pair).value(), 1);
        assert_eq!(fam.q_coeff(Component::First, 1, pair).value(), 5);
        assert_eq!(fam.q_coeff(Component::First, 2, pair).value(), 19);
    }

    #[test]
    fn p_and_c_coeff_examples() {
        let p = p109();
        let fam = CurveFamily::reference(4, p).unwrap();
        let k = Component::First;
        for pair in fam.pairs() {
            assert_eq!(fam.p_coeff(k, 0, pair), p.one());
        }
        assert_eq!(fam.p_coeff(k, 1, PairIndex::new(1, 2)), p.elem_i64(-50));
        assert_eq!(fam.c_coeff(k, 0), p.one());
        assert_eq!(fam.c_coeff(k, 1), p.elem_i64(-65));
        assert_eq!(fam.c_coeff(k, 4), p.elem(3 * 12 * 21 * 29));
    }

    #[test]
    fn pair_index_bijection() {
        for g in 4..=18 {
            let all: Vec<_> = PairIndex::all(g).collect();
            assert_eq!(all.len(), binomial2(g));
            for (pos, pair) in all.iter().enumerate() {
                assert_eq!(pair.position(g), pos);
                assert_eq!(PairIndex::from_position(g, pos), Some(*pair));
            }
            assert_eq!(PairIndex::from_position(g, binomial2(g)), None);
        }
    }

    fn family_strategy() -> impl Strategy<Value = CurveFamily> {
        (4usize..12, any::<u64>(), prop::sample::select(vec![109u64, 10007, 65521]))
            .prop_map(|(g, seed, p)| CurveFamily::random(g, PrimeModulus::new(p).unwrap(), seed).unwrap())
    }

    proptest! {
        #[test]
        fn q_recurrences(fam in family_strategy()) {
            let p = fam.modulus();
            let g = fam.genus();
            for k in Component::BOTH {
                for pair in fam.pairs() {
                    let (ai, aj) = (fam.alpha(k, pair.i), fam.alpha(k, pair.j));
                    let q1 = fam.q_coeff(k, 1, pair);
                    prop_assert_eq!(q1, p.add(ai, aj));
                    for h in 2..=g - 2 {
                        let rhs = p.sub(p.mul(q1, fam.q_coeff(k, h - 1, pair)), p.mul(p.mul(ai, aj), fam.q_coeff(k, h - 2, pair)));
                        prop_assert_eq!(fam.q_coeff(k, h, pair), rhs);
                    }
                    for h in 1..=g - 2 {
                        let rhs = p.add(p.mul(ai, fam.q_coeff(k, h - 1, pair)), p.pow(aj, h as u64));
                        prop_assert_eq!(fam.q_coeff(k, h, pair), rhs);
                    }
                }
            }
        }

        #[test]
        fn p_coeff_is_signed_esf_of_remaining(fam in family_strategy()) {
            let p = fam.modulus();
            let g = fam.genus();
            for k in Component::BOTH {
                for pair in fam.pairs().step_by(3) {
                    let rest: Vec<_> = (1..=g).filter(|&m| m != pair.i && m != pair.j).map(|m| fam.alpha(k, m)).collect();
                    // e_h by the recurrence e_h(x_1..x_n) = e_h(x_1..x_{n-1}) + x_n e_{h-1}(x_1..x_{n-1})
                    let mut e = vec![p.zero(); rest.len() + 1];
                    e[0] = p.one();
                    for (n, &x) in rest.iter().enumerate() {
                        for h in (1..=n + 1).rev() {
                            e[h] = p.add(e[h], p.mul(x, e[h - 1]));
                        }
                    }
                    for (h, &eh) in e.iter().enumerate().take(g - 1) {
                        let expect = if h % 2 == 1 { p.neg(eh) } else { eh };
                        prop_assert_eq!(fam.p_coeff(k, h, pair), expect);
                    }
                }
            }
        }
    }
}
