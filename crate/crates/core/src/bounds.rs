//! Closed-form spectra and extremal bounds for `S_α`.
//!
//! Every formula follows one rule for degenerate terms: a term whose
//! multiplicity is zero vanishes, and a term whose base is zero contributes
//! nothing for either sign of `α` (zero eigenvalues are outside the sum).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::invariants::{nonzero_power_sum, Alpha, InvariantError};
use crate::spectra::Spectrum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("part sizes must be positive, got ({r}, {s})")]
    InvalidParts { r: usize, s: usize },
    #[error("bound needs n >= {min}, got {n}")]
    TooFewVertices { n: usize, min: usize },
    #[error("invalid joined-cliques parameters n={n}, k={k}, i={i}")]
    InvalidCliqueJoin { n: usize, k: usize, i: usize },
    #[error("{0} needs a connectivity threshold k")]
    MissingK(BoundId),
    #[error("{0} needs the bipartition part sizes")]
    MissingParts(BoundId),
    #[error("unknown bound id {0:?}")]
    UnknownId(String),
    #[error("{family} has no variant for alpha = {alpha}")]
    AlphaOutsideFamily { family: BoundFamily, alpha: f64 },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn power_term(multiplicity: f64, base: f64, alpha: Alpha) -> f64 {
    if multiplicity == 0.0 || base == 0.0 {
        0.0
    } else {
        multiplicity * base.powf(alpha.value())
    }
}

/// `σ(Q(K_n)) = {2n-2, (n-2)^[n-1]}`.
pub fn complete_spectrum(n: usize) -> Result<Spectrum, BoundError> {
    if n == 0 {
        return Err(BoundError::TooFewVertices { n, min: 1 });
    }
    let mut values = vec![(n as f64) - 2.0; n - 1];
    values.push(2.0 * n as f64 - 2.0);
    Ok(Spectrum::from_values(values))
}

/// `σ(Q(K_{r,s})) = {r+s, r^[s-1], s^[r-1], 0}`.
pub fn complete_bipartite_spectrum(r: usize, s: usize) -> Result<Spectrum, BoundError> {
    if r == 0 || s == 0 {
        return Err(BoundError::InvalidParts { r, s });
    }
    let mut values = Vec::with_capacity(r + s);
    values.push((r + s) as f64);
    values.extend(std::iter::repeat_n(r as f64, s - 1));
    values.extend(std::iter::repeat_n(s as f64, r - 1));
    values.push(0.0);
    Ok(Spectrum::from_values(values))
}

/// The two simple eigenvalues of `Q(K_k ∨ (K_i ∪ K_{n-k-i}))` other than `n-2`.
fn joined_cliques_outer_pair(n: usize, k: usize, i: usize) -> (f64, f64) {
    let (n, k, i) = (n as f64, k as f64, i as f64);
    let centre = n - 2.0 + k / 2.0;
    let disc = (k - 2.0 * n).powi(2) + 16.0 * i * (k - n + i);
    let half_root = 0.5 * disc.sqrt();
    (centre + half_root, centre - half_root)
}

/// Closed-form signless Laplacian spectrum of `K_k ∨ (K_i ∪ K_{n-k-i})`.
///
/// Parameters follow [`Graph::joined_cliques`], including the `k = n-1`
/// case where the graph is `K_n`.
pub fn joined_cliques_spectrum(n: usize, k: usize, i: usize) -> Result<Spectrum, BoundError> {
    let invalid = BoundError::InvalidCliqueJoin { n, k, i };
    if k == 0 || k >= n || i == 0 {
        return Err(invalid);
    }
    if n - k == 1 {
        return if i == 1 {
            complete_spectrum(n)
        } else {
            Err(invalid)
        };
    }
    if i > (n - k) / 2 {
        return Err(invalid);
    }
    let (q1, q3) = joined_cliques_outer_pair(n, k, i);
    let nf = n as f64;
    let mut values = Vec::with_capacity(n);
    values.push(q1);
    values.push(q3);
    // n-2 appears once as a quotient eigenvalue and k-1 times from the joined clique.
    values.extend(std::iter::repeat_n(nf - 2.0, k));
    values.extend(std::iter::repeat_n((k + i) as f64 - 2.0, i - 1));
    values.extend(std::iter::repeat_n(nf - i as f64 - 2.0, n - k - i - 1));
    debug_assert_eq!(values.len(), n);
    Ok(Spectrum::from_values(values))
}

/// `(r+s)^α + (r-1)s^α + (s-1)r^α`: the value of `S_α(K_{r,s})`.
pub fn partite_bound(r: usize, s: usize, alpha: Alpha) -> Result<f64, BoundError> {
    if r == 0 || s == 0 {
        return Err(BoundError::InvalidParts { r, s });
    }
    let (rf, sf) = (r as f64, s as f64);
    Ok(power_term(1.0, rf + sf, alpha)
        + power_term(rf - 1.0, sf, alpha)
        + power_term(sf - 1.0, rf, alpha))
}

/// [`partite_bound`] at the balanced split `(⌊n/2⌋, ⌈n/2⌉)`.
pub fn balanced_bipartite_bound(n: usize, alpha: Alpha) -> Result<f64, BoundError> {
    if n < 2 {
        return Err(BoundError::TooFewVertices { n, min: 2 });
    }
    partite_bound(n / 2, n - n / 2, alpha)
}

/// `2^α(n-1)^α + (n-1)(n-2)^α`: the value of `S_α(K_n)`.
pub fn complete_graph_bound(n: usize, alpha: Alpha) -> Result<f64, BoundError> {
    if n < 2 {
        return Err(BoundError::TooFewVertices { n, min: 2 });
    }
    let nf = n as f64;
    Ok(power_term(1.0, 2.0 * (nf - 1.0), alpha) + power_term(nf - 1.0, nf - 2.0, alpha))
}

/// `b_α(n, k)`: `S_α` of `K_k ∨ (K_1 ∪ K_{n-k-1})`, evaluated from its closed-form spectrum.
pub fn connectivity_bound(n: usize, k: usize, alpha: Alpha) -> Result<f64, BoundError> {
    let spec = joined_cliques_spectrum(n, k, 1)?;
    // Integer closed forms at α = 1, 2.
    if alpha.value() == 1.0 {
        return Ok((2 * edge_count_bound(n, k)) as f64);
    }
    if alpha.value() == 2.0 {
        return Ok(laplacian_energy_bound(n, k).corrected as f64);
    }
    Ok(nonzero_power_sum(&spec, alpha)?)
}

/// Largest edge count in the family `κ(G) <= k`: `(n² - 3n + 2k + 2) / 2`.
pub fn edge_count_bound(n: usize, k: usize) -> usize {
    // n(n-3) is always even.
    (n * n + 2 * k + 2 - 3 * n) / 2
}

/// `b_2(n, k)` as a polynomial, next to the misprinted form that circulates for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaplacianEnergyBound {
    pub n: usize,
    pub k: usize,
    /// `n³ - 4n² + (2k+5)n + k² - k - 2`
    pub corrected: i64,
    /// `n³ + 2n² + (2k+5)n + k² - k - 2`, which does not equal `b_2(n, k)`.
    pub as_printed: i64,
}

pub const LAPLACIAN_ENERGY_POLYNOMIAL: &str = "n^3 - 4n^2 + (2k+5)n + k^2 - k - 2";
pub const LAPLACIAN_ENERGY_POLYNOMIAL_AS_PRINTED: &str = "n^3 + 2n^2 + (2k+5)n + k^2 - k - 2";

pub fn laplacian_energy_bound(n: usize, k: usize) -> LaplacianEnergyBound {
    let (ni, ki) = (n as i64, k as i64);
    let tail = (2 * ki + 5) * ni + ki * ki - ki - 2;
    LaplacianEnergyBound {
        n,
        k,
        corrected: ni.pow(3) - 4 * ni * ni + tail,
        as_printed: ni.pow(3) + 2 * ni * ni + tail,
    }
}

/// Whether a bound claims an upper or a lower limit on `S_α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

/// Graph family over which a bound is claimed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    ConnectedBipartite,
    Connected,
    /// Connected and not bipartite, or `K_2`.
    ConnectedNonBipartite,
    ConnectivityAtMostK,
}

macro_rules! bound_ids {
    ($($variant:ident => $text:literal),* $(,)?) => {
        /// Identifier of one directional bound.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum BoundId {
            $(#[serde(rename = $text)] $variant,)*
        }

        impl BoundId {
            pub const ALL: &'static [BoundId] = &[$(BoundId::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(BoundId::$variant => $text,)*
                }
            }
        }
    };
}

bound_ids! {
    PartiteUpper => "thm31-upper",
    PartiteLower => "thm31-lower",
    BalancedUpper => "thm32-upper",
    BalancedLower => "thm32-lower",
    CompleteUpper => "thm41-upper",
    CompleteLower => "thm41-lower",
    ConnectivityUpper => "thm43-upper",
    BalancedConjecture => "conj31-upper",
    ConnectivityConjectureUpper => "conj44-upper",
    ConnectivityConjectureLower => "conj44-lower",
}

impl BoundId {
    pub fn direction(self) -> Direction {
        use BoundId::*;
        match self {
            PartiteLower | BalancedLower | CompleteLower | ConnectivityConjectureLower => {
                Direction::Lower
            }
            _ => Direction::Upper,
        }
    }

    pub fn is_conjecture(self) -> bool {
        matches!(
            self,
            BoundId::BalancedConjecture
                | BoundId::ConnectivityConjectureUpper
                | BoundId::ConnectivityConjectureLower
        )
    }

    pub fn family(self) -> Family {
        use BoundId::*;
        match self {
            PartiteUpper | PartiteLower | BalancedUpper | BalancedLower | BalancedConjecture => {
                Family::ConnectedBipartite
            }
            CompleteUpper => Family::Connected,
            CompleteLower => Family::ConnectedNonBipartite,
            ConnectivityUpper | ConnectivityConjectureUpper | ConnectivityConjectureLower => {
                Family::ConnectivityAtMostK
            }
        }
    }

    pub fn bound_family(self) -> BoundFamily {
        use BoundId::*;
        match self {
            PartiteUpper | PartiteLower => BoundFamily::Partite,
            BalancedUpper | BalancedLower => BoundFamily::Balanced,
            CompleteUpper | CompleteLower => BoundFamily::Complete,
            ConnectivityUpper => BoundFamily::Connectivity,
            BalancedConjecture => BoundFamily::BalancedConjecture,
            ConnectivityConjectureUpper | ConnectivityConjectureLower => {
                BoundFamily::ConnectivityConjecture
            }
        }
    }

    pub fn admits_alpha(self, alpha: Alpha) -> bool {
        use BoundId::*;
        let a = alpha.value();
        match self {
            PartiteUpper | CompleteUpper => a > 0.0,
            BalancedUpper => a > 0.0 && a <= 1.0,
            ConnectivityUpper => a >= 1.0,
            BalancedConjecture => a > 1.0,
            ConnectivityConjectureUpper => a > 0.0 && a < 1.0,
            PartiteLower | BalancedLower | CompleteLower | ConnectivityConjectureLower => a < 0.0,
        }
    }

    pub fn alpha_range(self) -> &'static str {
        use BoundId::*;
        match self {
            PartiteUpper | CompleteUpper => "alpha > 0",
            BalancedUpper => "0 < alpha <= 1",
            ConnectivityUpper => "alpha >= 1",
            BalancedConjecture => "alpha > 1",
            ConnectivityConjectureUpper => "0 < alpha < 1",
            PartiteLower | BalancedLower | CompleteLower | ConnectivityConjectureLower => {
                "alpha < 0"
            }
        }
    }

    pub fn needs_k(self) -> bool {
        self.family() == Family::ConnectivityAtMostK
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = BoundError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| BoundError::UnknownId(s.to_string()))
    }
}

/// A bound family whose direction is fixed by the sign and size of `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundFamily {
    #[serde(rename = "thm31")]
    Partite,
    #[serde(rename = "thm32")]
    Balanced,
    #[serde(rename = "thm41")]
    Complete,
    #[serde(rename = "thm43")]
    Connectivity,
    #[serde(rename = "conj31")]
    BalancedConjecture,
    #[serde(rename = "conj44")]
    ConnectivityConjecture,
}

impl BoundFamily {
    pub const ALL: &'static [BoundFamily] = &[
        BoundFamily::Partite,
        BoundFamily::Balanced,
        BoundFamily::Complete,
        BoundFamily::Connectivity,
        BoundFamily::BalancedConjecture,
        BoundFamily::ConnectivityConjecture,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundFamily::Partite => "thm31",
            BoundFamily::Balanced => "thm32",
            BoundFamily::Complete => "thm41",
            BoundFamily::Connectivity => "thm43",
            BoundFamily::BalancedConjecture => "conj31",
            BoundFamily::ConnectivityConjecture => "conj44",
        }
    }

    pub fn members(self) -> impl Iterator<Item = BoundId> {
        BoundId::ALL
            .iter()
            .copied()
            .filter(move |id| id.bound_family() == self)
    }

    /// The member bound that applies at `alpha`, if any.
    pub fn resolve(self, alpha: Alpha) -> Option<BoundId> {
        self.members().find(|id| id.admits_alpha(alpha))
    }
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Either a specific directional bound or a family resolved per `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundSelector {
    Id(BoundId),
    Family(BoundFamily),
}

impl BoundSelector {
    pub fn resolve(self, alpha: Alpha) -> Result<BoundId, BoundError> {
        match self {
            BoundSelector::Id(id) => Ok(id),
            BoundSelector::Family(f) => f.resolve(alpha).ok_or(BoundError::AlphaOutsideFamily {
                family: f,
                alpha: alpha.value(),
            }),
        }
    }

    pub fn needs_k(self) -> bool {
        match self {
            BoundSelector::Id(id) => id.needs_k(),
            BoundSelector::Family(f) => f.members().any(BoundId::needs_k),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundSelector::Id(id) => id.as_str(),
            BoundSelector::Family(f) => f.as_str(),
        }
    }
}

impl fmt::Display for BoundSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundSelector {
    type Err = BoundError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(id) = s.parse::<BoundId>() {
            return Ok(BoundSelector::Id(id));
        }
        BoundFamily::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .map(BoundSelector::Family)
            .ok_or_else(|| BoundError::UnknownId(s.to_string()))
    }
}

/// A directional bound together with its connectivity threshold when it has one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundSpec {
    pub id: BoundId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl BoundSpec {
    pub fn new(id: BoundId) -> Self {
        Self { id, k: None }
    }

    pub fn with_k(id: BoundId, k: usize) -> Self {
        Self { id, k: Some(k) }
    }

    /// Human-readable applicability predicate.
    pub fn applicability(&self) -> String {
        let family = match self.id.family() {
            Family::ConnectedBipartite => "connected bipartite graphs".to_string(),
            Family::Connected => "connected graphs".to_string(),
            Family::ConnectedNonBipartite => "connected non-bipartite graphs and K_2".to_string(),
            Family::ConnectivityAtMostK => match self.k {
                Some(k) => format!("connected graphs with vertex connectivity <= {k}"),
                None => "connected graphs with vertex connectivity <= k".to_string(),
            },
        };
        format!("{}, {}", self.id.alpha_range(), family)
    }

    /// The graph claimed to attain the bound.
    pub fn extremal_description(&self) -> String {
        use BoundId::*;
        match self.id {
            PartiteUpper | PartiteLower => "K_{r,s} on the same bipartition".into(),
            BalancedUpper | BalancedLower | BalancedConjecture => "K_{floor(n/2),ceil(n/2)}".into(),
            CompleteUpper | CompleteLower => "K_n".into(),
            ConnectivityUpper | ConnectivityConjectureUpper | ConnectivityConjectureLower => {
                "K_k join (K_1 union K_{n-k-1})".into()
            }
        }
    }

    fn require_k(&self) -> Result<usize, BoundError> {
        self.k.ok_or(BoundError::MissingK(self.id))
    }

    /// Bound value for an `n`-vertex graph; `parts` is the bipartition, needed by the partite bound.
    pub fn evaluate(
        &self,
        n: usize,
        parts: Option<(usize, usize)>,
        alpha: Alpha,
    ) -> Result<f64, BoundError> {
        use BoundId::*;
        match self.id {
            PartiteUpper | PartiteLower => {
                let (r, s) = parts.ok_or(BoundError::MissingParts(self.id))?;
                partite_bound(r, s, alpha)
            }
            BalancedUpper | BalancedLower | BalancedConjecture => {
                balanced_bipartite_bound(n, alpha)
            }
            CompleteUpper | CompleteLower => complete_graph_bound(n, alpha),
            ConnectivityUpper | ConnectivityConjectureUpper | ConnectivityConjectureLower => {
                connectivity_bound(n, self.require_k()?, alpha)
            }
        }
    }

    pub fn extremal_graph(
        &self,
        n: usize,
        parts: Option<(usize, usize)>,
    ) -> Result<Graph, BoundError> {
        use BoundId::*;
        Ok(match self.id {
            PartiteUpper | PartiteLower => {
                let (r, s) = parts.ok_or(BoundError::MissingParts(self.id))?;
                Graph::complete_bipartite(r, s)?
            }
            BalancedUpper | BalancedLower | BalancedConjecture => {
                if n < 2 {
                    return Err(BoundError::TooFewVertices { n, min: 2 });
                }
                Graph::complete_bipartite(n / 2, n - n / 2)?
            }
            CompleteUpper | CompleteLower => Graph::complete(n)?,
            ConnectivityUpper | ConnectivityConjectureUpper | ConnectivityConjectureLower => {
                Graph::joined_cliques(n, self.require_k()?, 1)?
            }
        })
    }
}
