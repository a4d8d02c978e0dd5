//! Graph matrices and their real spectra.
//!
//! Eigenvalues come from cyclic Jacobi rotations on a dense copy of the
//! matrix. Jacobi is slow asymptotically but unconditionally stable and
//! highly accurate for the small orders handled here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bits, Graph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("matrix has order zero")]
    Empty,
    #[error(
        "Jacobi iteration did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },
}

/// Which graph matrix to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixKind {
    /// `A(G)`
    Adjacency,
    /// `L(G) = D(G) - A(G)`
    Laplacian,
    /// `Q(G) = D(G) + A(G)`
    SignlessLaplacian,
}

/// Dense real symmetric matrix in row-major storage.
///
/// Only constructors that write `(i, j)` and `(j, i)` together exist, so
/// symmetry is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds the matrix from its upper triangle (`i <= j`).
    pub fn from_upper<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

pub fn graph_matrix(g: &Graph, kind: MatrixKind) -> SymmetricMatrix {
    let n = g.n();
    let (diag, off) = match kind {
        MatrixKind::Adjacency => (false, 1.0),
        MatrixKind::Laplacian => (true, -1.0),
        MatrixKind::SignlessLaplacian => (true, 1.0),
    };
    let mut m = SymmetricMatrix::zeros(n);
    for v in 0..n {
        if diag {
            m.set(v, v, g.degree(v) as f64);
        }
        for u in bits(g.rows()[v]) {
            m.data[v * n + u] = off;
        }
    }
    m
}

pub fn adjacency(g: &Graph) -> SymmetricMatrix {
    graph_matrix(g, MatrixKind::Adjacency)
}

pub fn laplacian(g: &Graph) -> SymmetricMatrix {
    graph_matrix(g, MatrixKind::Laplacian)
}

pub fn signless_laplacian(g: &Graph) -> SymmetricMatrix {
    graph_matrix(g, MatrixKind::SignlessLaplacian)
}

/// Relative zero-classification threshold for a spectrum whose largest
/// eigenvalue has magnitude `radius`.
pub fn zero_threshold_for(radius: f64) -> f64 {
    1e-8 * radius.max(1.0)
}

/// Eigenvalues sorted in descending order, plus the threshold below which a
/// value counts as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    zero_threshold: f64,
}

impl Spectrum {
    /// Sorts `values` descending and derives the zero threshold from the largest magnitude.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let radius = values.iter().fold(0.0f64, |r, v| r.max(v.abs()));
        Self {
            values,
            zero_threshold: zero_threshold_for(radius),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn zero_threshold(&self) -> f64 {
        self.zero_threshold
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Values strictly above the zero threshold, largest first.
    pub fn nonzero(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .copied()
            .take_while(move |&v| v > self.zero_threshold)
    }

    /// Number of values classified non-zero.
    pub fn nonzero_count(&self) -> usize {
        self.nonzero().count()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Largest entrywise difference against another spectrum of the same length.
    pub fn max_deviation(&self, other: &Spectrum) -> f64 {
        assert_eq!(self.len(), other.len(), "spectra of different orders");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |d, (a, b)| d.max((a - b).abs()))
    }

    pub fn approx_eq(&self, other: &Spectrum, tol: f64) -> bool {
        self.len() == other.len() && self.max_deviation(other) <= tol
    }
}

/// Stopping rule for the Jacobi iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiOptions {
    /// Converged once the off-diagonal Frobenius norm is below this times `‖M‖_F`.
    pub relative_tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-12,
            max_sweeps: 100,
        }
    }
}

impl JacobiOptions {
    /// Tolerance 100x tighter than the default.
    pub fn tightened() -> Self {
        Self {
            relative_tolerance: 1e-14,
            ..Self::default()
        }
    }
}

pub fn eigenvalues(m: &SymmetricMatrix) -> Result<Spectrum, SpectraError> {
    eigenvalues_with(m, JacobiOptions::default())
}

pub fn eigenvalues_with(
    m: &SymmetricMatrix,
    opts: JacobiOptions,
) -> Result<Spectrum, SpectraError> {
    let mut work = m.data.clone();
    let values = jacobi_in_place(m.n, &mut work, opts)?;
    Ok(Spectrum::from_values(values))
}

/// Diagonalises the row-major symmetric `a` in place and returns its diagonal.
pub(crate) fn jacobi_in_place(
    n: usize,
    a: &mut [f64],
    opts: JacobiOptions,
) -> Result<Vec<f64>, SpectraError> {
    if n == 0 {
        return Err(SpectraError::Empty);
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = opts.relative_tolerance * norm;
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(a);
        if off <= target {
            break;
        }
        if sweeps == opts.max_sweeps {
            return Err(SpectraError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = arp - s * (arq + arp * tau);
                    let new_rq = arq + s * (arp - arq * tau);
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
            }
        }
    }
    Ok((0..n).map(|i| a[i * n + i]).collect())
}

pub fn spectrum_of(g: &Graph, kind: MatrixKind) -> Result<Spectrum, SpectraError> {
    eigenvalues(&graph_matrix(g, kind))
}

/// Spectrum of `Q(G)`.
pub fn q_spectrum(g: &Graph) -> Result<Spectrum, SpectraError> {
    spectrum_of(g, MatrixKind::SignlessLaplacian)
}

/// Spectrum of `L(G)`.
pub fn l_spectrum(g: &Graph) -> Result<Spectrum, SpectraError> {
    spectrum_of(g, MatrixKind::Laplacian)
}

/// Spectrum of `A(G)`.
pub fn a_spectrum(g: &Graph) -> Result<Spectrum, SpectraError> {
    spectrum_of(g, MatrixKind::Adjacency)
}
