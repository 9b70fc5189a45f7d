//! Partial-monitoring games for online ranking with top-k feedback: game
//! construction, observability analysis, and learners.

pub mod analysis;
pub mod baselines;
pub mod cli;
pub mod error;
pub mod game;
pub mod linalg;
pub mod lp;
pub mod markov;
pub mod nw2;
pub mod ranking;
pub mod reduction;
pub mod sim;

pub use error::{Error, Result};
pub use game::{build_game, GameSpec};
pub use ranking::{MeasureSpec, Permutation, RelevanceVector};
