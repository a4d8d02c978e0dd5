//! Exact spectral fingerprints.
//!
//! The power sums `tr(M^j)`, `j = 1..n`, of an integer symmetric matrix
//! determine its characteristic polynomial through Newton's identities, so
//! two graphs with equal keys have identical spectra. Keys are computed in
//! exact integer arithmetic, which makes them safe cache keys for
//! floating-point eigensolves.

use serde::{Deserialize, Serialize};

use crate::graph::bits;
use crate::spectra::MatrixKind;

/// Largest order whose power sums fit in `i64` (`n · (2n-2)^n < 2^63`).
pub const KEY_MAX_VERTICES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpectralKey {
    n: u8,
    sums: [i64; KEY_MAX_VERTICES],
}

impl SpectralKey {
    pub fn order(&self) -> usize {
        self.n as usize
    }

    /// `tr(M^j)` for `j = 1..=n`.
    pub fn power_sums(&self) -> &[i64] {
        &self.sums[..self.n as usize]
    }
}

type Square = [[i64; KEY_MAX_VERTICES]; KEY_MAX_VERTICES];

/// Key of `Q`, `L` or `A` built from adjacency rows, or `None` above [`KEY_MAX_VERTICES`].
pub fn spectral_key(rows: &[u64], kind: MatrixKind) -> Option<SpectralKey> {
    let n = rows.len();
    if n == 0 || n > KEY_MAX_VERTICES {
        return None;
    }
    let (diag_sign, off) = match kind {
        MatrixKind::SignlessLaplacian => (1, 1),
        MatrixKind::Laplacian => (1, -1),
        MatrixKind::Adjacency => (0, 1),
    };
    let diag: Vec<i64> = rows
        .iter()
        .map(|r| diag_sign * r.count_ones() as i64)
        .collect();
    // (M P)[i][j] = d_i P[i][j] + off * Σ_{u ~ i} P[u][j]
    let times = |p: &Square| -> Square {
        let mut out = [[0i64; KEY_MAX_VERTICES]; KEY_MAX_VERTICES];
        for i in 0..n {
            let row = &mut out[i];
            for j in 0..n {
                row[j] = diag[i] * p[i][j];
            }
            for u in bits(rows[i]) {
                for j in 0..n {
                    row[j] += off * p[u][j];
                }
            }
        }
        out
    };
    let inner = |a: &Square, b: &Square| -> i64 {
        (0..n)
            .map(|i| (0..n).map(|j| a[i][j] * b[i][j]).sum::<i64>())
            .sum()
    };

    let mut sums = [0i64; KEY_MAX_VERTICES];
    sums[0] = diag.iter().sum();
    let mut identity = [[0i64; KEY_MAX_VERTICES]; KEY_MAX_VERTICES];
    for (i, row) in identity.iter_mut().enumerate().take(n) {
        row[i] = 1;
    }
    let mut lower = times(&identity);
    // tr(M^{2a}) = <M^a, M^a>, tr(M^{2a+1}) = <M^a, M^{a+1}>
    let mut a = 1;
    loop {
        if 2 * a <= n {
            sums[2 * a - 1] = inner(&lower, &lower);
        }
        if 2 * a + 1 > n {
            break;
        }
        let upper = times(&lower);
        sums[2 * a] = inner(&lower, &upper);
        lower = upper;
        a += 1;
    }
    Some(SpectralKey { n: n as u8, sums })
}
