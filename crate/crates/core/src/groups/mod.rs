//! Ordered groups: words, order oracles (ℤ, lexicographic ℤᵈ, Dehornoy order
//! on B₃), balls of the Cayley graph, sign multipliers and their commutators,
//! combinatorial Toeplitz indices, and the free Hilbert transform.

mod ball;
mod braid;
mod free;
mod toeplitz;
mod word;

pub use ball::{word_equal, GroupBall, OrderOracle, BALL_FORMAT_VERSION};
pub use braid::{
    burau, handle_reduce, handle_reduce_checked, BurauMatrix, Classification, HandleReduction, Laurent,
    DEFAULT_STEP_BUDGET,
};
pub use free::{free_hilbert, free_hilbert_commutator, FreeHilbertSigns};
pub use toeplitz::{
    commutator_report, group_f_operator, group_f_symbol, group_toeplitz_index, CommutatorReport, GroupIndexReport,
    MonomialMatrix,
};
pub use word::{parse_word, GroupTag, GroupWord, Letter};
