//! The self-similar action of the block on decoded cofactor vectors.
//!
//! For the generic vertex matrix (entries treated as indeterminates) there
//! are four distinguished vectors e_1..e_4 in each thick space V_j on which
//! the block acts through the entrywise-squared vertex matrix:
//!
//! ```text
//! e_i^(j) · b_jk = a_jk² · e_i^(k)
//! ```
//!
//! The vectors come from representing polynomials: e_i^(j) decodes the
//! cofactor of C = A + diag(u1..u4) obtained by deleting row i and column j.
//! Everything here is exact; the identity is checked literally, either over
//! the polynomial ring itself or over any concrete coefficient ring.

use std::fmt;
use std::sync::OnceLock;

use crate::lattice::{BlockOperator, SEGMENT};
use crate::mat::Mat;
use crate::poly::{minor_det, Monomial, Poly, PolyMatrix, PolyRing, VarId};
use crate::ring::Ring;

/// The generic 4×4 vertex matrix with indeterminate entries.
pub fn symbolic_vertex_matrix() -> PolyMatrix {
    Mat::from_fn(PolyRing, 4, 4, |r, c| Poly::var(VarId::a(r + 1, c + 1)))
}

/// C = A + diag(u1, u2, u3, u4) over the polynomial ring.
pub fn build_c() -> PolyMatrix {
    Mat::from_fn(PolyRing, 4, 4, |r, c| {
        let a = Poly::var(VarId::a(r + 1, c + 1));
        if r == c {
            a.add(&Poly::var(VarId::u(r + 1)))
        } else {
            a
        }
    })
}

/// The three spectral variables of thick space `j` (0-based): all u's except
/// u_{j+1}, in ascending order.
pub fn decode_scope(j: usize) -> [VarId; 3] {
    assert!(j < 4);
    let mut out = [VarId::u(1); 3];
    let mut t = 0;
    for k in 1..=4 {
        if k != j + 1 {
            out[t] = VarId::u(k);
            t += 1;
        }
    }
    out
}

/// Exponent patterns of the eight representing monomials, in slot order:
/// v1v2v3, v1v2, v1v3, v1, v2v3, v2, v3, 1.
fn decode_patterns() -> [[u8; 3]; 8] {
    let mut out = [[0u8; 3]; 8];
    for (idx, pat) in out.iter_mut().enumerate() {
        let bits = 7 - idx as u8;
        *pat = [(bits >> 2) & 1, (bits >> 1) & 1, bits & 1];
    }
    out
}

/// An element of a thick space written as eight coefficient polynomials
/// (u-free) in slot order.
pub type EVector = [Poly; 8];

/// Reads the eight slot coefficients of a representing polynomial for thick
/// space `j` (0-based). The polynomial must be multilinear in the three
/// in-scope spectral variables and free of the out-of-scope ones.
pub fn decode(p: &Poly, j: usize) -> EVector {
    let scope = decode_scope(j);
    for v in p.vars_used() {
        if v.is_u() {
            assert!(
                scope.contains(&v),
                "representing polynomial for space {} contains out-of-scope {v}",
                j + 1
            );
            assert!(
                p.max_exponent_of(v) <= 1,
                "representing polynomial is not multilinear in {v}"
            );
        }
    }
    let mut out: EVector = Default::default();
    for (slot, pat) in decode_patterns().iter().enumerate() {
        out[slot] = p.coeff_of(&scope, pat);
    }
    debug_assert_eq!(encode(&out, j), *p, "slot decomposition must be exhaustive");
    out
}

/// Inverse of [`decode`]: assembles the representing polynomial of a thick
/// vector whose slot coefficients are u-free.
pub fn encode(x: &EVector, j: usize) -> Poly {
    let scope = decode_scope(j);
    let mut acc = Poly::zero();
    for (slot, pat) in decode_patterns().iter().enumerate() {
        assert!(
            x[slot].vars_used().iter().all(|v| !v.is_u()),
            "slot coefficients must be u-free"
        );
        let factors: Vec<(VarId, u8)> = scope
            .iter()
            .zip(pat)
            .filter(|&(_, &e)| e == 1)
            .map(|(&v, &e)| (v, e))
            .collect();
        let m = Poly::from_monomial(Monomial::from_factors(factors));
        acc = acc.add(&x[slot].mul(&m));
    }
    acc
}

fn evec_table() -> &'static [[EVector; 4]; 4] {
    static TABLE: OnceLock<[[EVector; 4]; 4]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let c = build_c();
        std::array::from_fn(|i| std::array::from_fn(|j| decode(&minor_det(&c, i, j), j)))
    })
}

/// The symbolic vector e_{i+1}^{(j+1)} (0-based i, j): the decoded cofactor
/// of C with row i and column j deleted. Entries are u-free polynomials in
/// the vertex-matrix indeterminates.
pub fn evec(i: usize, j: usize) -> &'static EVector {
    &evec_table()[i][j]
}

/// Specializes a symbolic e-vector by substituting concrete values for the
/// vertex-matrix entries.
pub fn evec_in<R: Ring>(ring: &R, a: &Mat<R>, i: usize, j: usize) -> Vec<R::Elem> {
    assert_eq!((a.nrows(), a.ncols()), (4, 4));
    evec(i, j)
        .iter()
        .map(|p| {
            p.eval(ring, |v| {
                let (r, c) = v.a_indices().expect("e-vector entries are u-free");
                a.get(r, c).clone()
            })
        })
        .collect()
}

/// The 4×8 matrix whose rows are e_1^(j)..e_4^(j) specialized at `a`.
pub fn evec_basis_in<R: Ring>(ring: &R, a: &Mat<R>, j: usize) -> Mat<R> {
    let rows: Vec<Vec<R::Elem>> = (0..4).map(|i| evec_in(ring, a, i, j)).collect();
    Mat::from_rows(ring.clone(), SEGMENT, rows)
}

/// Entrywise squaring; an additive map in characteristic 2.
pub fn frobenius_matrix<R: Ring>(a: &Mat<R>) -> Mat<R> {
    let ring = a.ring().clone();
    a.map(|x| ring.square(x))
}

/// Outcome of one thick-entry identity e_i^(j) · b_jk = a_jk² · e_i^(k),
/// checked for all four vectors i.
#[derive(Debug, Clone)]
pub struct ThickEntryCheck {
    pub j: usize,
    pub k: usize,
    pub pass: bool,
    /// First mismatch, rendered, if any.
    pub detail: Option<String>,
}

/// Result of checking all sixteen thick-entry identities.
#[derive(Debug, Clone)]
pub struct FrobeniusReport {
    pub checks: Vec<ThickEntryCheck>,
}

impl FrobeniusReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_pairs(&self) -> Vec<(usize, usize)> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| (c.j, c.k))
            .collect()
    }
}

impl fmt::Display for FrobeniusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "thick entry ({}, {}): {}",
                c.j + 1,
                c.k + 1,
                if c.pass { "ok" } else { "MISMATCH" }
            )?;
            if let Some(d) = &c.detail {
                writeln!(f, "    {d}")?;
            }
        }
        Ok(())
    }
}

/// Checks all sixteen identities e_i^(j) · b_jk = a_jk² · e_i^(k) over any
/// coefficient ring: exactly, entry by entry.
pub fn verify_frobenius_in<R: Ring>(ring: &R, a: &Mat<R>) -> FrobeniusReport {
    assert_eq!((a.nrows(), a.ncols()), (4, 4));
    let block = BlockOperator::from_vertex_matrix(a);
    let bases: Vec<Mat<R>> = (0..4).map(|j| evec_basis_in(ring, a, j)).collect();
    let mut checks = Vec::with_capacity(16);
    for j in 0..4 {
        for k in 0..4 {
            let lhs = bases[j].mul(&block.thick_entry(j, k));
            let scale = ring.square(a.get(j, k));
            let rhs = bases[k].scalar_mul(&scale);
            let mut detail = None;
            'scan: for i in 0..4 {
                for slot in 0..SEGMENT {
                    if lhs.get(i, slot) != rhs.get(i, slot) {
                        detail = Some(format!(
                            "vector {} slot {}: lhs = {}, rhs = {}",
                            i + 1,
                            slot + 1,
                            lhs.get(i, slot),
                            rhs.get(i, slot),
                        ));
                        break 'scan;
                    }
                }
            }
            checks.push(ThickEntryCheck {
                j,
                k,
                pass: detail.is_none(),
                detail,
            });
        }
    }
    FrobeniusReport { checks }
}

/// The fully symbolic check: vertex-matrix entries are indeterminates, so a
/// pass is a polynomial identity, valid over every characteristic-2 ring.
pub fn verify_frobenius_symbolic() -> FrobeniusReport {
    verify_frobenius_in(&PolyRing, &symbolic_vertex_matrix())
}

/// Symbolic minor-transpose identity: deleting row i / column j commutes
/// with transposition, so minor(Cᵀ, j, i) = minor(C, i, j) as polynomials
/// for all sixteen (i, j). True for any matrix; checked here on the fully
/// symbolic C = A + diag(u).
pub fn verify_minor_transpose() -> bool {
    let c = build_c();
    let ct = c.transpose();
    (0..4).all(|i| (0..4).all(|j| minor_det(&ct, j, i) == minor_det(&c, i, j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ExtField;
    use crate::ring::F2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decode_slot_conventions() {
        // For space 1 the scope is (u2, u3, u4): the monomial u2 u3 u4 is
        // slot 1 and the constant is slot 8.
        let p = Poly::var(VarId::u(2))
            .mul(&Poly::var(VarId::u(3)))
            .mul(&Poly::var(VarId::u(4)));
        let d = decode(&p, 0);
        assert!(d[0].is_one());
        assert!(d[1..].iter().all(Poly::is_zero));
        let d = decode(&Poly::one(), 0);
        assert!(d[7].is_one());
        assert!(d[..7].iter().all(Poly::is_zero));
        // For space 2 the scope is (u1, u3, u4); u3 alone is v2, slot 6.
        let d = decode(&Poly::var(VarId::u(3)), 1);
        assert!(d[5].is_one());
    }

    #[test]
    fn encode_decode_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for j in 0..4 {
            for _ in 0..20 {
                // random multilinear polynomial in the scope variables with
                // random a-monomial coefficients
                let scope = decode_scope(j);
                let mut p = Poly::zero();
                for pat in decode_patterns() {
                    if rng.gen() {
                        let mut factors: Vec<(VarId, u8)> = scope
                            .iter()
                            .zip(pat)
                            .filter(|&(_, e)| e == 1)
                            .map(|(&v, e)| (v, e))
                            .collect();
                        factors.push((VarId::a(rng.gen_range(1..=4), rng.gen_range(1..=4)), 1));
                        p = p.add(&Poly::from_monomial(Monomial::from_factors(factors)));
                    }
                }
                assert_eq!(encode(&decode(&p, j), j), p);
            }
        }
    }

    #[test]
    fn evecs_are_u_free_and_nonzero() {
        for i in 0..4 {
            for j in 0..4 {
                let e = evec(i, j);
                assert!(e.iter().any(|p| !p.is_zero()), "e_{i}^{j} vanished");
                for p in e {
                    assert!(p.vars_used().iter().all(|v| !v.is_u()));
                }
            }
        }
    }

    #[test]
    fn symbolic_frobenius_identity_holds() {
        let report = verify_frobenius_symbolic();
        assert!(report.all_pass(), "{report}");
    }

    #[test]
    fn minor_transpose_identity_holds() {
        assert!(verify_minor_transpose());
    }

    #[test]
    fn specialization_commutes_with_evaluation() {
        // Specializing the symbolic e-vectors agrees with decoding the
        // cofactors of the specialized C; checked over GF(2^4).
        let f = ExtField::new(4);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let a = Mat::from_fn(f, 4, 4, |_, _| f.random_elem(&mut rng));
        for i in 0..4 {
            for j in 0..4 {
                let direct = evec_in(&f, &a, i, j);
                let minor = minor_det(&build_c(), i, j);
                for (slot, pat) in decode_patterns().iter().enumerate() {
                    let coeff = minor.coeff_of(&decode_scope(j), pat);
                    let val = coeff.eval(&f, |v| {
                        let (r, c) = v.a_indices().unwrap();
                        *a.get(r, c)
                    });
                    assert_eq!(direct[slot], val);
                }
            }
        }
    }

    #[test]
    fn frobenius_identity_specializes_to_f2() {
        // Includes singular and degenerate matrices: the identity has no
        // genericity assumptions.
        let samples: Vec<Mat<F2>> = vec![
            Mat::zeros(F2, 4, 4),
            Mat::identity(F2, 4),
            Mat::from_fn(F2, 4, 4, |_, _| true),
            Mat::from_fn(F2, 4, 4, |r, c| (r + c) % 2 == 0),
        ];
        for a in samples {
            let report = verify_frobenius_in(&F2, &a);
            assert!(report.all_pass(), "{report}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10 {
            let a = Mat::from_fn(F2, 4, 4, |_, _| rng.gen());
            assert!(verify_frobenius_in(&F2, &a).all_pass());
        }
    }

    #[test]
    fn frobenius_identity_specializes_to_extensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for k in [2, 8, 16] {
            let f = ExtField::new(k);
            for _ in 0..3 {
                let a = Mat::from_fn(f, 4, 4, |_, _| f.random_elem(&mut rng));
                assert!(verify_frobenius_in(&f, &a).all_pass(), "degree {k}");
            }
        }
    }

    #[test]
    fn frobenius_matrix_squares_entries() {
        let a = symbolic_vertex_matrix();
        let sq = frobenius_matrix(&a);
        assert_eq!(*sq.get(2, 3), Poly::var(VarId::a(3, 4)).square());
    }
}
