//! Discrete Morse theory for unordered configuration spaces of trees:
//! critical cells, Betti numbers, the cohomology ring in degrees one and two,
//! and the right-angled Artin group test built on it.

pub mod cell;
pub mod cup;
pub mod morse;
pub mod raag;
pub mod tree;

pub use cell::{Cell, CellError, Chain, Cochain, ConfigSpace, Endpoint, Item};
pub use cup::{
    build_hat_complex, class_leq, class_of, lub, lub_by_scan, one_classes_of, phi_cocycle,
    push_to_normal_form, push_to_normal_form_by, try_critical_representative, CellClass, CupError,
    CupRing, DualBasisVector, HatComplex, Product, RingTable, Triangle,
};
pub use morse::{
    betti_numbers, classify, critical_cells, flow, flow_infinity, match_down, match_up,
    morse_boundary, CellStatus, MorseData, MorseError,
};
pub use raag::{
    check_type_preservation, embed_t_min, flag_completion, non_flag_witness, product_complex,
    raag_status, theta_cell, NonFlagWitness, RaagError, SimplicialComplex, TreeEmbedding,
    TypeReport, Verdict, VerdictReason,
};
pub use tree::{DirectionIndex, EdgeRef, NodeLabel, PlaneTree, TreeError, TreeSpec, Vertex, ROOT};
