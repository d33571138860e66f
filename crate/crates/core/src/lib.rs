// SPDX-License-Identifier: Apache-2.0

pub mod numerics;
pub mod qops;
pub mod renewal;
pub mod response;
pub mod trajectories;

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
