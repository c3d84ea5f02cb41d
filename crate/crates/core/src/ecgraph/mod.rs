//! Ordinary elliptic curves over small prime fields, their horizontal
//! isogeny graphs, and the comparison with class-group Cayley graphs.

mod curve;
mod dlp;
mod field;
mod graph;
mod isogeny;

pub use curve::{apply_isomorphism, j_invariant, parse_curves_csv, point_count, Curve, Point};
pub use dlp::{baby_step_giant_step, dlp_base_point, forward_edges, planted_instance, transfer_dlp, DlpTranscript, TransferStep};
pub use field::{Fp, Poly};
pub use graph::{
    build_isogeny_graph, coloured_isomorphism, compare_to_cayley, enumerate_isogeny_class, frobenius_discriminant,
    predicted_cayley_graph, rational_l_isogenies, Check, ComparisonReport, Isogeny, IsogenyGraph,
    ISOMORPHISM_SEARCH_LIMIT,
};
pub use isogeny::{division_polynomials, isogeny_eval, rational_kernels, velu_codomain, velu_image, IsogenyEdge};
