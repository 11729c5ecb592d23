//! Exact arithmetic for a four-dimensional vertex model over
//! characteristic-2 fields: the 2×2×2×2 block of a 4×4 vertex matrix, its
//! graded invariant summands, and the induced flow on vertex matrices.
//!
//! The crate is organized bottom-up:
//!
//! - [`ring`]: ring and field descriptors (GF(2), extension fields,
//!   polynomial rings share one interface),
//! - [`mat`]: dense matrices over any descriptor, with row reduction over
//!   fields,
//! - [`bitmat`]: bit-packed GF(2) matrices used by the search,
//! - [`ext`]: GF(2^k) with canonically chosen moduli,
//! - [`poly`]: sparse multivariate polynomials over GF(2) in the sixteen
//!   vertex-matrix entries and four auxiliary variables,
//! - [`lattice`]: edge indexing of the 2×2×2×2 block and the ordered
//!   product of vertex embeddings,
//! - [`selfsim`]: the cofactor vectors, the decode/encode pair, and the
//!   symbolic verification that the block acts on them by squared entries,
//! - [`wspace`]: the cofactor summand, its distinguished complement, and
//!   the randomized split check over large fields,
//! - [`search`]: spin closures, summand selection, cell actions,
//!   classification, and the blocking flow,
//! - [`showcase`]: a frozen worked example with an exact verifier.

pub mod bitmat;
pub mod ext;
pub mod lattice;
pub mod mat;
pub mod poly;
pub mod ring;
pub mod search;
pub mod selfsim;
pub mod showcase;
pub mod wspace;

pub use bitmat::BitMatrix;
pub use ext::ExtField;
pub use lattice::{block_product, BlockOperator, BLOCK_DIM, SEGMENT};
pub use mat::Mat;
pub use poly::{Poly, PolyRing, VarId};
pub use ring::{Field, Ring, F2};
pub use search::{
    decompose_pipeline, graded_spin, iterate_flow, spin_closures, BitBlock, BitSubspace,
    CellAction, Decomposition, Dictionary, FlowState, Summand,
};
pub use selfsim::{
    verify_frobenius_in, verify_frobenius_symbolic, verify_minor_transpose, FrobeniusReport,
};
pub use wspace::{build_w, build_wprime, randomized_summand_check, GradedSubspace, SummandSplit};
