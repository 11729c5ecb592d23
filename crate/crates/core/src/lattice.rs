//! The 2×2×2×2 block of sixteen copies of a 4×4 vertex matrix.
//!
//! Sixteen vertices sit at {0,1}^4. Every vertex carries a copy of the vertex
//! matrix relating its four input spins to its four output spins; spins live
//! on edges. For each direction there are eight parallel edges, identified by
//! the three coordinates of the edge orthogonal to its axis and ordered
//! lexicographically, giving 32 edge slots: direction-1 edges first, then
//! direction 2, and so on.
//!
//! The whole block acts on 32-rows (row vectors, acting from the right) as
//! the product of per-vertex embeddings taken over vertices in order of
//! ascending coordinate sum, lexicographic within equal sums, with the vertex
//! (0,0,0,0) as the leftmost factor.

use crate::mat::Mat;
use crate::ring::Ring;

/// Edges in the block: 8 per direction × 4 directions.
pub const BLOCK_DIM: usize = 32;
/// Parallel edges per direction.
pub const SEGMENT: usize = 8;

/// Vertex position in the block; each coordinate is 0 or 1.
pub type VertexCoords = [u8; 4];

/// 0-based slot of an edge in a 32-row.
pub type EdgeId = usize;

/// Slot of the edge in direction `dir` (0-based 0..4) with the given three
/// orthogonal coordinates, each 0 or 1.
pub fn edge_index(dir: usize, coords: [u8; 3]) -> EdgeId {
    assert!(dir < 4);
    assert!(coords.iter().all(|&c| c <= 1));
    dir * SEGMENT + (4 * coords[0] + 2 * coords[1] + coords[2]) as usize
}

/// Slot of the edge in direction `dir` passing through vertex `v`: the edge
/// coordinates are those of `v` with coordinate `dir` removed.
pub fn vertex_edge(dir: usize, v: VertexCoords) -> EdgeId {
    assert!(dir < 4);
    let mut w = [0u8; 3];
    let mut t = 0;
    for (i, &c) in v.iter().enumerate() {
        if i != dir {
            w[t] = c;
            t += 1;
        }
    }
    edge_index(dir, w)
}

/// Embedding of the 4×4 vertex matrix at vertex `v` into the 32-dimensional
/// edge space: identity everywhere except that entry (i, j) of `a` is placed
/// at the slots of the direction-i and direction-j edges through `v`.
pub fn big_embed<R: Ring>(a: &Mat<R>, v: VertexCoords) -> Mat<R> {
    assert_eq!((a.nrows(), a.ncols()), (4, 4), "vertex matrix must be 4×4");
    assert!(v.iter().all(|&c| c <= 1));
    let mut out = Mat::identity(a.ring().clone(), BLOCK_DIM);
    for i in 0..4 {
        for j in 0..4 {
            out.set(vertex_edge(i, v), vertex_edge(j, v), a.get(i, j).clone());
        }
    }
    out
}

/// The sixteen vertices in product order: ascending coordinate sum, and
/// lexicographic within a fixed sum. The first entry is (0,0,0,0).
pub fn vertex_product_order() -> Vec<VertexCoords> {
    let all: Vec<VertexCoords> = (0u8..16)
        .map(|b| [(b >> 3) & 1, (b >> 2) & 1, (b >> 1) & 1, b & 1])
        .collect();
    let mut out = Vec::with_capacity(16);
    for layer in 0..=4u8 {
        out.extend(all.iter().copied().filter(|v| v.iter().sum::<u8>() == layer));
    }
    out
}

/// Product of the sixteen vertex embeddings in product order (leftmost factor
/// is the vertex (0,0,0,0); row vectors act from the right).
pub fn block_product<R: Ring>(a: &Mat<R>) -> Mat<R> {
    let mut acc = Mat::identity(a.ring().clone(), BLOCK_DIM);
    for v in vertex_product_order() {
        acc = acc.mul(&big_embed(a, v));
    }
    acc
}

/// The 32×32 matrix of the block, with thick-entry access.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator<R: Ring> {
    mat: Mat<R>,
}

impl<R: Ring> BlockOperator<R> {
    pub fn from_vertex_matrix(a: &Mat<R>) -> Self {
        BlockOperator {
            mat: block_product(a),
        }
    }

    pub fn matrix(&self) -> &Mat<R> {
        &self.mat
    }

    pub fn into_matrix(self) -> Mat<R> {
        self.mat
    }

    /// The 8×8 submatrix mapping direction-j spins to direction-k spins
    /// (0-based j, k).
    pub fn thick_entry(&self, j: usize, k: usize) -> Mat<R> {
        assert!(j < 4 && k < 4);
        self.mat
            .submatrix(j * SEGMENT..(j + 1) * SEGMENT, k * SEGMENT..(k + 1) * SEGMENT)
    }
}

/// The edge relabeling induced by flipping every vertex coordinate 0 ↔ 1:
/// within each direction's 8-segment, position p maps to 7 − p. Involution.
pub fn reversal_permutation() -> [usize; BLOCK_DIM] {
    let mut p = [0usize; BLOCK_DIM];
    for (slot, entry) in p.iter_mut().enumerate() {
        let seg = slot / SEGMENT;
        let pos = slot % SEGMENT;
        *entry = seg * SEGMENT + (SEGMENT - 1 - pos);
    }
    p
}

/// Applies the coordinate-flip relabeling to a 32-row.
pub fn reversed_block_row<T: Clone>(row: &[T]) -> Vec<T> {
    assert_eq!(row.len(), BLOCK_DIM);
    let perm = reversal_permutation();
    (0..BLOCK_DIM).map(|i| row[perm[i]].clone()).collect()
}

/// Bit-packed variant of [`reversed_block_row`] for 32-bit rows.
pub fn reversed_block_bits(row: u64) -> u64 {
    assert!(row >> BLOCK_DIM == 0, "expected a 32-bit row");
    let mut out = 0u64;
    for seg in 0..4 {
        let byte = ((row >> (seg * SEGMENT)) & 0xFF) as u8;
        out |= (byte.reverse_bits() as u64) << (seg * SEGMENT);
    }
    out
}

/// Conjugation of a 32×32 matrix by the reversal permutation: entry (r, c)
/// moves to (σr, σc).
pub fn reversed_block_conjugate<R: Ring>(m: &Mat<R>) -> Mat<R> {
    assert_eq!((m.nrows(), m.ncols()), (BLOCK_DIM, BLOCK_DIM));
    let perm = reversal_permutation();
    Mat::from_fn(m.ring().clone(), BLOCK_DIM, BLOCK_DIM, |r, c| {
        m.get(perm[r], perm[c]).clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmat::BitMatrix;
    use crate::ring::F2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_f2(rng: &mut impl Rng) -> Mat<F2> {
        Mat::from_fn(F2, 4, 4, |_, _| rng.gen())
    }

    #[test]
    fn edge_indices_cover_all_slots() {
        let mut seen = [false; BLOCK_DIM];
        for dir in 0..4 {
            for bits in 0..8u8 {
                let coords = [(bits >> 2) & 1, (bits >> 1) & 1, bits & 1];
                let e = edge_index(dir, coords);
                assert!(!seen[e]);
                seen[e] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(edge_index(0, [0, 0, 0]), 0);
        assert_eq!(edge_index(3, [1, 1, 1]), 31);
    }

    #[test]
    fn vertex_edges_by_hand() {
        let v = [0, 1, 0, 1];
        assert_eq!(vertex_edge(0, v), 4 + 1); // coords (1,0,1)
        assert_eq!(vertex_edge(1, v), 8 + 1); // coords (0,0,1)
        assert_eq!(vertex_edge(2, v), 16 + 3); // coords (0,1,1)
        assert_eq!(vertex_edge(3, v), 24 + 2); // coords (0,1,0)
    }

    #[test]
    fn product_order_layers() {
        let order = vertex_product_order();
        assert_eq!(order.len(), 16);
        assert_eq!(order[0], [0, 0, 0, 0]);
        assert_eq!(order[15], [1, 1, 1, 1]);
        assert_eq!(
            &order[1..5],
            &[[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
        );
        let sums: Vec<u8> = order.iter().map(|v| v.iter().sum()).collect();
        assert!(sums.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn embedding_of_identity_is_identity() {
        let id4 = Mat::identity(F2, 4);
        assert!(big_embed(&id4, [1, 0, 1, 0]).is_identity());
        assert!(block_product(&id4).is_identity());
    }

    #[test]
    fn embedding_touches_only_incident_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = random_f2(&mut rng);
        let v = [1, 1, 0, 1];
        let emb = big_embed(&a, v);
        let touched: Vec<usize> = (0..4).map(|d| vertex_edge(d, v)).collect();
        for r in 0..BLOCK_DIM {
            for c in 0..BLOCK_DIM {
                if touched.contains(&r) && touched.contains(&c) {
                    continue;
                }
                assert_eq!(*emb.get(r, c), r == c);
            }
        }
    }

    /// Vertices with equal coordinate sums have disjoint edge sets, so their
    /// embeddings commute and the in-layer factor order is immaterial.
    #[test]
    fn same_layer_factors_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let a = random_f2(&mut rng);
            let reference = block_product(&a);
            // Shuffle each layer independently and re-multiply.
            let mut order = vertex_product_order();
            for layer in 0..=4u8 {
                let idx: Vec<usize> = (0..16)
                    .filter(|&i| order[i].iter().sum::<u8>() == layer)
                    .collect();
                // Fisher-Yates on the slice positions of this layer
                for i in (1..idx.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    order.swap(idx[i], idx[j]);
                }
            }
            let mut acc = Mat::identity(F2, BLOCK_DIM);
            for v in order {
                acc = acc.mul(&big_embed(&a, v));
            }
            assert_eq!(acc, reference);
        }
    }

    #[test]
    fn reversal_is_an_involution() {
        let perm = reversal_permutation();
        for i in 0..BLOCK_DIM {
            assert_eq!(perm[perm[i]], i);
            assert_eq!(i / SEGMENT, perm[i] / SEGMENT);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let row: u64 = rng.gen::<u64>() & 0xFFFF_FFFF;
            assert_eq!(reversed_block_bits(reversed_block_bits(row)), row);
        }
        // bit and generic variants agree
        let row: Vec<bool> = (0..32).map(|i| (0xDEAD_BEEFu64 >> i) & 1 == 1).collect();
        let rev = reversed_block_row(&row);
        let packed = reversed_block_bits(0xDEAD_BEEF);
        for (i, &b) in rev.iter().enumerate() {
            assert_eq!(b, (packed >> i) & 1 == 1);
        }
    }

    /// The transpose of the block is the block of the transpose, conjugated
    /// by the coordinate-flip relabeling.
    #[test]
    fn transpose_conjugation_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..20 {
            let a = random_f2(&mut rng);
            let b = block_product(&a);
            let bt_direct = b.transpose();
            let bt_built = reversed_block_conjugate(&block_product(&a.transpose()));
            assert_eq!(bt_direct, bt_built);
        }
    }

    #[test]
    fn thick_entries_tile_the_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let a = random_f2(&mut rng);
        let block = BlockOperator::from_vertex_matrix(&a);
        for j in 0..4 {
            for k in 0..4 {
                let t = block.thick_entry(j, k);
                for r in 0..SEGMENT {
                    for c in 0..SEGMENT {
                        assert_eq!(
                            t.get(r, c),
                            block.matrix().get(j * SEGMENT + r, k * SEGMENT + c)
                        );
                    }
                }
            }
        }
        // spot-check against the packed representation
        let packed = BitMatrix::from_mat(block.matrix());
        assert_eq!(packed.to_mat(), *block.matrix());
    }
}
