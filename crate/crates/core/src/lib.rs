//! Exact Pareto curves for two-objective total-reward stochastic games.
//!
//! All arithmetic is over arbitrary-precision rationals. The crate provides
//! the game model ([`game`]), exact planar frontier geometry ([`frontier`]),
//! the one-step operator and value iteration ([`bellman`]), exact Pareto
//! curves of MDPs ([`mdp`]), the strategy-enumeration solver for determined
//! games ([`determined`]), inverse betting games ([`betting`]) and
//! executable slope-relation audits ([`audit`]).

pub mod audit;
pub mod bellman;
pub mod betting;
pub mod determined;
pub mod error;
pub mod frontier;
pub mod game;
pub mod gen;
pub mod mdp;
pub mod rational;

pub use audit::Report;
pub use bellman::{CurveMap, IterationResult};
pub use betting::{BettingConfig, BettingGame};
pub use error::{Error, Result};
pub use frontier::{Frontier, Slope};
pub use game::{CheckedGame, Game, StateKind, StateRecord, Transition};
pub use mdp::{MdPolicy, MdStrategy};
pub use rational::{Rat, Vec2};
