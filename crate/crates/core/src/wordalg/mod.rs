//! Truncated tensor algebra on the letters `A_0 .. A_{2g-1}`.

pub mod index;
pub mod lie;
pub mod ring;
pub mod tensor;

pub use index::{concat_rank, phi, psi, rank_of, tau, word_of_string, word_string, WordIndex};
pub use lie::{to_lie_expr, LieExpr, LieWord};
pub use ring::Coeff;
pub use tensor::{shuffle_words, Key, TensorElem, TensorJson, TensorSquare, TermJson};
