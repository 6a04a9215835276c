//! Birkhoff sums of the Saint-Petersburg potential under the doubling map.
//!
//! The potential is `phi(x) = 2^n` on `(2^-(n+1), 2^-n]`, i.e. `2^n` when the
//! binary expansion of `x` starts with `0^n 1`. The crate provides
//!
//! * exact symbolic dynamics on digit streams with big-integer Birkhoff sums
//!   ([`dyadic`]),
//! * the pressure series and its root `t(q)` ([`pressure`]),
//! * the Birkhoff spectrum as the Legendre transform of `t(q)` ([`spectrum`]),
//! * exact sampling of the Gibbs measures on return-time blocks ([`gibbs`]),
//! * explicit points whose sums follow a prescribed fast growth
//!   ([`constructions`]) and the regime table for those growth rates
//!   ([`growth`]),
//! * seeded Monte Carlo checks ([`experiments`]) and a command-line front end
//!   ([`cli`]).

pub mod cli;
pub mod constructions;
pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod gibbs;
pub mod growth;
pub mod pressure;
pub mod report;
pub mod rng;
pub mod spectrum;

pub use error::{Error, Result};
