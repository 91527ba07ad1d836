//! Simulation and estimation toolkit for SPAD-based direct time-of-flight
//! ranging without timestamp histograms.
//!
//! The crate is organised around three layers:
//!
//! * [`photon_model`] describes the photon flux reaching the detector as an
//!   inhomogeneous Poisson process, provides the closed-form statistics of that
//!   process and samples it exactly.
//! * [`detectors`] emulates what a real detector reports: the classic
//!   first-photon SPAD, the dead-time-free linear detector, and the two
//!   acquisition schemes that turn a first-photon SPAD into a linear one
//!   (acquire-or-discard and time-gated). Histograms and histogram replay
//!   live here as well.
//! * [`estimation`] turns linearized timestamps into a time-of-flight estimate
//!   using only two counters and one accumulator, plus the reference
//!   estimators used to validate it.
//!
//! [`stats`] holds the goodness-of-fit machinery used by the experiments and
//! tests, and [`rng`] the deterministic per-stream seeding.
//!
//! ```
//! use spadlin::photon_model::{alpha, laser_mean_time, linear_mean, tof_from_mu, LaserPulse, SceneConfig};
//!
//! let pulse = LaserPulse::rectangular(4e-9, 0.4);
//! let scene = SceneConfig::new(1e7, pulse, 25e-9, 100e-9)?;
//! let mu = linear_mean(&scene)?;
//! let tof = tof_from_mu(mu, alpha(&scene)?, scene.t_acq(), laser_mean_time(&pulse)?)?;
//! assert!((tof - 25e-9).abs() < 1e-18);
//! # Ok::<(), spadlin::Error>(())
//! ```

pub mod detectors;
mod error;
pub mod estimation;
pub mod photon_model;
pub mod rng;
pub mod stats;
mod time;

pub use error::{Error, Result};
pub use time::{TimePs, PS_PER_SECOND};
