//! Sparse multivariate polynomials over GF(2) in the twenty variables of the
//! block construction: sixteen matrix entries a11..a44 and four spectral
//! parameters u1..u4.
//!
//! Coefficients live in GF(2), so a polynomial is just the set of its
//! monomials: addition is symmetric difference, and squaring distributes over
//! sums (the freshman's dream). Exponents are tracked, not reduced — a11² is
//! distinct from a11.

use std::collections::BTreeSet;
use std::fmt;

use crate::mat::Mat;
use crate::ring::Ring;

/// One of the twenty variables. Codes 0..=15 are the matrix entries in
/// row-major order; codes 16..=19 are u1..u4. The derived order puts every
/// matrix entry before every spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(u8);

impl VarId {
    /// Matrix entry a(i,j), 1-based.
    pub fn a(i: usize, j: usize) -> Self {
        assert!((1..=4).contains(&i) && (1..=4).contains(&j));
        VarId(((i - 1) * 4 + (j - 1)) as u8)
    }

    /// Spectral parameter u_k, 1-based.
    pub fn u(k: usize) -> Self {
        assert!((1..=4).contains(&k));
        VarId(16 + (k - 1) as u8)
    }

    pub fn is_u(self) -> bool {
        self.0 >= 16
    }

    /// For a matrix-entry variable, its 0-based (row, column); `None` for u's.
    pub fn a_indices(self) -> Option<(usize, usize)> {
        if self.is_u() {
            None
        } else {
            Some(((self.0 / 4) as usize, (self.0 % 4) as usize))
        }
    }

    /// For a spectral variable u_k, its 0-based k; `None` for matrix entries.
    pub fn u_index(self) -> Option<usize> {
        if self.is_u() {
            Some((self.0 - 16) as usize)
        } else {
            None
        }
    }

    pub fn code(self) -> u8 {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_u() {
            write!(f, "u{}", self.0 - 16 + 1)
        } else {
            write!(f, "a{}{}", self.0 / 4 + 1, self.0 % 4 + 1)
        }
    }
}

/// Product of variable powers, kept sorted by variable with exponents ≥ 1.
/// The empty monomial is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    factors: Vec<(VarId, u8)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    pub fn var(v: VarId) -> Self {
        Monomial { factors: vec![(v, 1)] }
    }

    pub fn from_factors(mut factors: Vec<(VarId, u8)>) -> Self {
        factors.retain(|&(_, e)| e > 0);
        factors.sort_by_key(|&(v, _)| v);
        for w in factors.windows(2) {
            assert!(w[0].0 < w[1].0, "duplicate variable in monomial factors");
        }
        Monomial { factors }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(VarId, u8)] {
        &self.factors
    }

    pub fn exponent_of(&self, v: VarId) -> u8 {
        self.factors
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn total_degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (va, ea) = self.factors[i];
            let (vb, eb) = other.factors[j];
            match va.cmp(&vb) {
                std::cmp::Ordering::Less => {
                    out.push((va, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((vb, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((va, ea.checked_add(eb).expect("exponent overflow")));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        Monomial { factors: out }
    }

    pub fn square(&self) -> Self {
        Monomial {
            factors: self
                .factors
                .iter()
                .map(|&(v, e)| (v, e.checked_mul(2).expect("exponent overflow")))
                .collect(),
        }
    }

    /// Splits into (exponents over `scope` in order, remainder monomial).
    fn split(&self, scope: &[VarId]) -> (Vec<u8>, Monomial) {
        let exps = scope.iter().map(|&v| self.exponent_of(v)).collect();
        let rest = Monomial {
            factors: self
                .factors
                .iter()
                .filter(|&&(v, _)| !scope.contains(&v))
                .cloned()
                .collect(),
        };
        (exps, rest)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (i, &(v, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial over GF(2): the set of monomials with coefficient 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeSet<Monomial>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::from_monomial(Monomial::one())
    }

    pub fn var(v: VarId) -> Self {
        Poly::from_monomial(Monomial::var(v))
    }

    pub fn constant(b: bool) -> Self {
        if b {
            Poly::one()
        } else {
            Poly::zero()
        }
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(m);
        Poly { terms }
    }

    pub fn from_monomials(ms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut p = Poly::zero();
        for m in ms {
            p.toggle(m);
        }
        p
    }

    fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().unwrap().is_one()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        // Symmetric difference: like terms cancel in pairs.
        Poly {
            terms: self
                .terms
                .symmetric_difference(&other.terms)
                .cloned()
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Poly::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.mul(b));
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        // Characteristic 2: cross terms cancel, so squaring maps monomials.
        Poly {
            terms: self.terms.iter().map(Monomial::square).collect(),
        }
    }

    pub fn vars_used(&self) -> BTreeSet<VarId> {
        self.terms
            .iter()
            .flat_map(|m| m.factors().iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn max_exponent_of(&self, v: VarId) -> u8 {
        self.terms
            .iter()
            .map(|m| m.exponent_of(v))
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of the monomial with exponents `want` over the variables
    /// `scope`, as a polynomial in the remaining variables.
    pub fn coeff_of(&self, scope: &[VarId], want: &[u8]) -> Poly {
        assert_eq!(scope.len(), want.len());
        let mut out = Poly::zero();
        for m in &self.terms {
            let (exps, rest) = m.split(scope);
            if exps == want {
                out.toggle(rest);
            }
        }
        out
    }

    /// Partial substitution of GF(2) values: variables assigned `Some` are
    /// replaced, variables assigned `None` stay symbolic.
    pub fn substitute_f2(&self, assign: impl Fn(VarId) -> Option<bool>) -> Poly {
        let mut out = Poly::zero();
        'terms: for m in &self.terms {
            let mut kept = Vec::new();
            for &(v, e) in m.factors() {
                match assign(v) {
                    Some(false) => continue 'terms,
                    Some(true) => {}
                    None => kept.push((v, e)),
                }
            }
            out.toggle(Monomial { factors: kept });
        }
        out
    }

    /// Full evaluation in any ring of characteristic 2.
    pub fn eval<R: Ring>(&self, ring: &R, assign: impl Fn(VarId) -> R::Elem) -> R::Elem {
        let mut acc = ring.zero();
        for m in &self.terms {
            let mut term = ring.one();
            for &(v, e) in m.factors() {
                let base = assign(v);
                for _ in 0..e {
                    term = ring.mul(&term, &base);
                }
            }
            acc = ring.add(&acc, &term);
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Ring descriptor for GF(2)[a11..a44, u1..u4].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PolyRing;

impl Ring for PolyRing {
    type Elem = Poly;

    fn zero(&self) -> Poly {
        Poly::zero()
    }

    fn one(&self) -> Poly {
        Poly::one()
    }

    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.add(b)
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mul(b)
    }

    fn is_zero(&self, a: &Poly) -> bool {
        a.is_zero()
    }

    fn is_one(&self, a: &Poly) -> bool {
        a.is_one()
    }

    fn square(&self, a: &Poly) -> Poly {
        a.square()
    }
}

/// Matrices with polynomial entries.
pub type PolyMatrix = Mat<PolyRing>;

/// Determinant by Laplace expansion along the first row. The entry ring has
/// characteristic 2 (the `Ring` trait offers no negation), so cofactor signs
/// vanish and the determinant equals the permanent. Intended for n ≤ 4.
pub fn determinant<R: Ring>(m: &Mat<R>) -> R::Elem {
    assert_eq!(m.nrows(), m.ncols(), "determinant of a non-square matrix");
    let ring = m.ring().clone();
    match m.nrows() {
        0 => ring.one(),
        1 => m.get(0, 0).clone(),
        n => {
            let mut acc = ring.zero();
            for c in 0..n {
                if ring.is_zero(m.get(0, c)) {
                    continue;
                }
                let sub = m.delete_row_col(0, c);
                let term = ring.mul(m.get(0, c), &determinant(&sub));
                acc = ring.add(&acc, &term);
            }
            acc
        }
    }
}

/// Determinant of the submatrix with `row` and `col` (0-based) deleted.
pub fn minor_det<R: Ring>(m: &Mat<R>, row: usize, col: usize) -> R::Elem {
    determinant(&m.delete_row_col(row, col))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ExtField;
    use crate::ring::F2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a(i: usize, j: usize) -> Poly {
        Poly::var(VarId::a(i, j))
    }

    fn u(k: usize) -> Poly {
        Poly::var(VarId::u(k))
    }

    #[test]
    fn char_two_addition() {
        let p = a(1, 1).add(&u(2));
        assert_eq!(p.add(&p), Poly::zero());
        assert_eq!(p.add(&Poly::zero()), p);
    }

    #[test]
    fn display_formats() {
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::one().to_string(), "1");
        let p = a(1, 2).mul(&u(1)).add(&Poly::one());
        assert_eq!(p.to_string(), "1 + a12*u1");
        assert_eq!(a(2, 3).square().to_string(), "a23^2");
    }

    #[test]
    fn freshman_dream_squaring() {
        let p = a(1, 1).add(&a(2, 2)).add(&u(3).mul(&a(1, 4)));
        let direct = p.mul(&p);
        assert_eq!(direct, p.square());
        assert_eq!(
            p.square(),
            a(1, 1)
                .square()
                .add(&a(2, 2).square())
                .add(&u(3).square().mul(&a(1, 4).square()))
        );
    }

    #[test]
    fn coeff_extraction() {
        // p = u1*u2*a11 + u1*a12 + a13
        let p = u(1)
            .mul(&u(2))
            .mul(&a(1, 1))
            .add(&u(1).mul(&a(1, 2)))
            .add(&a(1, 3));
        let scope = [VarId::u(1), VarId::u(2)];
        assert_eq!(p.coeff_of(&scope, &[1, 1]), a(1, 1));
        assert_eq!(p.coeff_of(&scope, &[1, 0]), a(1, 2));
        assert_eq!(p.coeff_of(&scope, &[0, 0]), a(1, 3));
        assert_eq!(p.coeff_of(&scope, &[0, 1]), Poly::zero());
    }

    #[test]
    fn partial_substitution() {
        let p = a(1, 1).mul(&u(1)).add(&a(1, 2));
        let q = p.substitute_f2(|v| if v == VarId::a(1, 1) { Some(true) } else { None });
        assert_eq!(q, u(1).add(&a(1, 2)));
        let r = p.substitute_f2(|v| if v == VarId::a(1, 1) { Some(false) } else { None });
        assert_eq!(r, a(1, 2));
    }

    #[test]
    fn eval_matches_substitution() {
        let p = a(1, 1).mul(&u(1)).add(&a(2, 2).mul(&u(2))).add(&Poly::one());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let assign: Vec<bool> = (0..20).map(|_| rng.gen()).collect();
            let by_eval = p.eval(&F2, |v| assign[v.code() as usize]);
            let by_subst = p.substitute_f2(|v| Some(assign[v.code() as usize]));
            assert_eq!(by_subst.is_one(), by_eval);
            assert!(by_subst.is_zero() || by_subst.is_one());
        }
    }

    /// Permanent by brute-force permutation sums — the independent oracle for
    /// the Laplace determinant (they coincide in characteristic 2).
    fn permanent_oracle<R: Ring>(m: &Mat<R>) -> R::Elem {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for i in 0..n {
                    let mut q = p.clone();
                    q.insert(i, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let ring = m.ring().clone();
        let mut acc = ring.zero();
        for p in perms(m.nrows()) {
            let mut term = ring.one();
            for (r, &c) in p.iter().enumerate() {
                term = ring.mul(&term, m.get(r, c));
            }
            acc = ring.add(&acc, &term);
        }
        acc
    }

    #[test]
    fn determinant_matches_permanent_oracle() {
        let f = ExtField::new(8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=4 {
            for _ in 0..20 {
                let m = Mat::from_fn(f, n, n, |_, _| f.random_elem(&mut rng));
                assert_eq!(determinant(&m), permanent_oracle(&m));
            }
        }
    }

    #[test]
    fn determinant_symbolic_two_by_two() {
        // det [[a11+u1, a12], [a21, a22+u2]] expanded by hand
        let m = Mat::from_rows(
            PolyRing,
            2,
            vec![
                vec![a(1, 1).add(&u(1)), a(1, 2)],
                vec![a(2, 1), a(2, 2).add(&u(2))],
            ],
        );
        let expect = a(1, 1)
            .mul(&a(2, 2))
            .add(&a(1, 1).mul(&u(2)))
            .add(&u(1).mul(&a(2, 2)))
            .add(&u(1).mul(&u(2)))
            .add(&a(1, 2).mul(&a(2, 1)));
        assert_eq!(determinant(&m), expect);
        assert_eq!(determinant(&m), permanent_oracle(&m));
    }

    #[test]
    fn singular_matrix_has_zero_determinant() {
        let row = vec![a(1, 1), a(1, 2)];
        let m = Mat::from_rows(PolyRing, 2, vec![row.clone(), row]);
        assert!(determinant(&m).is_zero());
    }

    #[test]
    fn minor_drops_requested_row_and_column() {
        let m = Mat::from_fn(PolyRing, 3, 3, |r, c| a(r + 1, c + 1));
        let d = minor_det(&m, 0, 1);
        // det [[a21, a23], [a31, a33]] = a21*a33 + a23*a31
        let expect = a(2, 1).mul(&a(3, 3)).add(&a(2, 3).mul(&a(3, 1)));
        assert_eq!(d, expect);
    }
}
