//! Equilibria of mean-field games played by a mix of rational and herding
//! players.
//!
//! A fraction `alpha` of the population best-responds to the population
//! distribution of actions; the rest copy the most popular action. The
//! crate verifies candidate equilibria for any finite action set
//! ([`game`]), builds the full equilibrium set of two-action games
//! ([`two_action`]), searches a simplex grid as an independent check
//! ([`oracle`]), compares player and social utilities ([`welfare`]) and
//! ships closed-form example games ([`catalog`]).
//!
//! ```
//! use alpha_rne::catalog::{bandwidth_game, BandwidthParams};
//! use alpha_rne::{Alpha, TwoActionSolver};
//!
//! let game = bandwidth_game(BandwidthParams {});
//! let set = TwoActionSolver::default()
//!     .alpha_rne_set(&game, Alpha::new(0.25)?)?;
//! assert_eq!(set.zs(), vec![0.25, 1.0]);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod catalog;
pub mod game;
pub mod oracle;
pub mod simplex;
pub mod tolerance;
pub mod two_action;
pub mod utility;
pub mod welfare;

pub use game::{
    best_response_support, majority_action, population_measure, verify_alpha_rne, ActionSet,
    Alpha, Distribution, GameError, ProfilePair, Utility, Verdict,
};
pub use tolerance::Tolerances;
pub use two_action::{EquilibriumSet, TwoActionGame, TwoActionSolver};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/two-actions.md")]
    mod two_actions {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/welfare.md")]
    mod welfare {}
    #[doc = include_str!("../../../book/src/games.md")]
    mod games {}
}
