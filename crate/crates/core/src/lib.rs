// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Numerical laboratory for semiclassical Weyl laws and Riesz means of
//! Schrödinger operators −ℏ²Δ + V with Hölder-rough potentials.

pub mod cover;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod framing;
pub mod grid;
pub mod mollify;
pub mod params;
pub mod potential;
pub mod quadrature;
pub mod special;
pub mod spectra;
pub mod sweep;
pub mod weyl;

pub use error::{Error, Result};
pub use grid::{GridSpec, SampledField};
pub use params::{choose_scaling, g_gamma, HolderClass, ScalingMode, ScalingRule, SemiclassicalParams};
pub use potential::{sublevel_set, Potential, PotentialSpec, SeparableSpec};
pub use spectra::{SparseSymOperator, Spectrum};
