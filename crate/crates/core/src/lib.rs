//! Static timing analysis for Shor order-finding circuits.
//!
//! The core is generic over the duration scalar ([`time::Time`]); the aliases
//! below pin it to integer nanoseconds, which is what the CLI and the sweep
//! driver use. The ebit link model works in floating point.

pub mod circuit;
pub mod designs;
pub mod distribution;
pub mod ebit;
pub mod profile;
pub mod sweep;
pub mod time;
pub mod timing;

pub use time::Time;

/// Integer nanoseconds.
pub type Nanos = i64;

pub type Circuit = circuit::Circuit<Nanos>;
pub type Instruction = circuit::Instruction<Nanos>;
pub type DelayProfile = profile::DelayProfile<Nanos>;
pub type Schedule = timing::Schedule<Nanos>;
pub type WeightedCircuitGraph = circuit::graph::WeightedCircuitGraph<Nanos>;
pub type ShorDesignSpec = designs::ShorDesignSpec<Nanos>;
pub type CuProvider = designs::CuProvider<Nanos>;
pub type DistributedLayout = distribution::DistributedLayout<Nanos>;
pub type EbitChannel = distribution::EbitChannel<Nanos>;
pub type TimingReport = timing::decompose::TimingReport<Nanos>;
pub type EbitLinkParams = ebit::EbitLinkParams<f64>;
