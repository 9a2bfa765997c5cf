//! Exact computation of universal unipotent connections, their logarithmic extensions,
//! the Hodge filtration and de Rham period maps on curves `y^2 = f(x)` with `deg f` odd.

pub mod error;
pub mod evalnum;
pub mod exactalg;
pub mod hodge;
pub mod periods;
pub mod cli;
pub mod connext;
pub mod wordalg;

pub use error::{Error, Result};
