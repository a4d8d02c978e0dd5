//! Scalar spectral and degree invariants.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::spectra::{a_spectrum, l_spectrum, q_spectrum, SpectraError, Spectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantError {
    #[error("exponent must be a finite non-zero real, got {0}")]
    InvalidAlpha(f64),
    #[error("negative power sum is undefined: every eigenvalue is zero")]
    NoNonzeroEigenvalues,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("negative degree power with isolated vertex {0}")]
    IsolatedVertex(usize),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// A finite, non-zero real exponent.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self, InvariantError> {
        if value == 0.0 || !value.is_finite() {
            return Err(InvariantError::InvalidAlpha(value));
        }
        Ok(Self(value))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = InvariantError;
    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Sum of `v^α` over the values of `spec` classified non-zero.
///
/// Values at or below the zero threshold contribute nothing for any `α`.
pub fn nonzero_power_sum(spec: &Spectrum, alpha: Alpha) -> Result<f64, InvariantError> {
    let a = alpha.value();
    let mut count = 0usize;
    let mut sum = 0.0;
    for v in spec.nonzero() {
        sum += v.powf(a);
        count += 1;
    }
    if count == 0 && alpha.is_negative() {
        return Err(InvariantError::NoNonzeroEigenvalues);
    }
    Ok(sum)
}

/// `S_α(G)`: power sum over the non-zero signless Laplacian eigenvalues.
pub fn signless_power_sum(g: &Graph, alpha: Alpha) -> Result<f64, InvariantError> {
    nonzero_power_sum(&q_spectrum(g)?, alpha)
}

/// `s_α(G)`: power sum over the non-zero Laplacian eigenvalues.
pub fn laplacian_power_sum(g: &Graph, alpha: Alpha) -> Result<f64, InvariantError> {
    nonzero_power_sum(&l_spectrum(g)?, alpha)
}

/// `Z_α(G) = Σ d_i^α`; `Z_2` is the first Zagreb index.
pub fn zagreb(g: &Graph, alpha: f64) -> Result<f64, InvariantError> {
    let mut sum = 0.0;
    for v in 0..g.n() {
        let d = g.degree(v);
        if d == 0 && alpha < 0.0 {
            return Err(InvariantError::IsolatedVertex(v));
        }
        sum += (d as f64).powf(alpha);
    }
    Ok(sum)
}

/// Exact first Zagreb index `M_1 = Σ d_i²`.
pub fn first_zagreb(g: &Graph) -> u64 {
    (0..g.n()).map(|v| (g.degree(v) as u64).pow(2)).sum()
}

/// Graph energy `E(G) = Σ |λ_i|` over the adjacency spectrum.
pub fn energy(g: &Graph) -> Result<f64, InvariantError> {
    Ok(a_spectrum(g)?.values().iter().map(|v| v.abs()).sum())
}

/// `Kf(G) = n · Σ 1/μ_i` over the non-zero Laplacian eigenvalues of a connected graph.
pub fn kirchhoff_index(g: &Graph) -> Result<f64, InvariantError> {
    if !g.is_connected() {
        return Err(InvariantError::Disconnected);
    }
    if g.n() == 1 {
        return Ok(0.0);
    }
    let s = laplacian_power_sum(g, Alpha(-1.0))?;
    Ok(g.n() as f64 * s)
}

/// The named invariants of one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantBundle {
    pub m: usize,
    /// Incidence energy, `S_{1/2}`.
    pub incidence_energy: f64,
    /// Laplacian-energy-like invariant, `s_{1/2}`.
    pub lel: f64,
    /// Kirchhoff index, `n · s_{-1}`.
    pub kirchhoff: f64,
    /// Sum of squared Laplacian eigenvalues, `s_2`.
    pub laplacian_energy: f64,
    /// Adjacency energy.
    pub energy: f64,
    /// First Zagreb index.
    pub m1: f64,
}

/// Computes every named invariant; the graph must be connected.
pub fn named_invariants(g: &Graph) -> Result<InvariantBundle, InvariantError> {
    if !g.is_connected() {
        return Err(InvariantError::Disconnected);
    }
    let q = q_spectrum(g)?;
    let l = l_spectrum(g)?;
    let half = Alpha(0.5);
    let kirchhoff = if g.n() == 1 {
        0.0
    } else {
        g.n() as f64 * nonzero_power_sum(&l, Alpha(-1.0))?
    };
    Ok(InvariantBundle {
        m: g.edge_count(),
        incidence_energy: nonzero_power_sum(&q, half)?,
        lel: nonzero_power_sum(&l, half)?,
        kirchhoff,
        laplacian_energy: nonzero_power_sum(&l, Alpha(2.0))?,
        energy: energy(g)?,
        m1: first_zagreb(g) as f64,
    })
}
