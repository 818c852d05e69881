//! Hamiltonian constructors for the chain and one-loop lattices.
//!
//! Node order of the loop graph with wedge length `K` (dimension `2K + 2`):
//!
//! ```text
//! x_{-K} .. x_{-1}, x_{0+}, x_{0-}, x_1 .. x_K
//! ```
//!
//! The upper loop node `x_{0+}` precedes the lower one `x_{0-}`. The discrete
//! Laplacian puts 2 on the diagonal except at the two degree-3 branch vertices
//! `x_{-1}`, `x_1`, which get 3. Every plain edge carries a symmetric -1.
//! Non-Hermitian decorations are antisymmetric shifts of an edge pair:
//! `z` on the two outermost edges, `g` on `(x_{-1}, x_{0+})` and
//! `(x_{0-}, x_1)`, `h` on `(x_{-1}, x_{0-})` and `(x_{0+}, x_1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareRealMatrix;

/// Free chain of size `2K`: tridiagonal `(-1, 2, -1)` with Dirichlet ends.
pub fn build_free_chain(k: usize) -> Result<SquareRealMatrix> {
    build_coupled_chain(k, 0.0)
}

/// Chain of size `2K` whose central bond carries `-1 - nu` above and
/// `-1 + nu` below the diagonal.
pub fn build_coupled_chain(k: usize, nu: f64) -> Result<SquareRealMatrix> {
    if k == 0 {
        return Err(Error::EmptyLattice);
    }
    check_finite("nu", nu)?;
    let n = 2 * k;
    let mut m = SquareRealMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = 2.0;
    }
    for i in 0..n - 1 {
        m[(i, i + 1)] = -1.0;
        m[(i + 1, i)] = -1.0;
    }
    m[(k - 1, k)] = -1.0 - nu;
    m[(k, k - 1)] = -1.0 + nu;
    Ok(m)
}

/// One-loop graph Hamiltonian `H^(K)(g, h; z)` of dimension `2K + 2`.
pub fn build_loop_graph(k: usize, g: f64, h: f64, z: f64) -> Result<SquareRealMatrix> {
    if k < 2 {
        return Err(Error::LoopTooShort(k));
    }
    check_finite("g", g)?;
    check_finite("h", h)?;
    check_finite("z", z)?;
    let n = 2 * k + 2;
    let left_branch = k - 1;
    let upper = k;
    let lower = k + 1;
    let right_branch = k + 2;

    let mut m = SquareRealMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = 2.0;
    }
    m[(left_branch, left_branch)] = 3.0;
    m[(right_branch, right_branch)] = 3.0;

    for (a, b) in chain_edges(k) {
        m[(a, b)] = -1.0;
        m[(b, a)] = -1.0;
    }
    // outermost edges
    m[(0, 1)] = -1.0 - z;
    m[(1, 0)] = -1.0 + z;
    m[(n - 2, n - 1)] = -1.0 + z;
    m[(n - 1, n - 2)] = -1.0 - z;
    // loop edges
    m[(left_branch, upper)] = -1.0 - g;
    m[(upper, left_branch)] = -1.0 + g;
    m[(left_branch, lower)] = -1.0 - h;
    m[(lower, left_branch)] = -1.0 + h;
    m[(upper, right_branch)] = -1.0 + h;
    m[(right_branch, upper)] = -1.0 - h;
    m[(lower, right_branch)] = -1.0 + g;
    m[(right_branch, lower)] = -1.0 - g;
    Ok(m)
}

/// Edges of the two external wedges of the loop graph, as index pairs.
fn chain_edges(k: usize) -> impl Iterator<Item = (usize, usize)> {
    let n = 2 * k + 2;
    (0..k - 1).map(|i| (i, i + 1)).chain((k + 2..n - 1).map(|i| (i, i + 1)))
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {value} is not finite")))
    }
}

/// `(g, h) -> (gamma, delta)` with `gamma = (g + h) / 2`, `delta = (g - h) / 2`.
pub fn reparameterize(g: f64, h: f64) -> (f64, f64) {
    ((g + h) / 2.0, (g - h) / 2.0)
}

/// Inverse of [`reparameterize`]: `(gamma, delta) -> (gamma + delta, gamma - delta)`.
pub fn compose(gamma: f64, delta: f64) -> (f64, f64) {
    (gamma + delta, gamma - delta)
}

/// Couplings of the loop Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    pub g: f64,
    pub h: f64,
    pub z: f64,
}

impl ParameterPoint {
    pub fn new(g: f64, h: f64, z: f64) -> Self {
        Self { g, h, z }
    }

    pub fn from_gamma_delta(gamma: f64, delta: f64, z: f64) -> Self {
        let (g, h) = compose(gamma, delta);
        Self { g, h, z }
    }

    pub fn gamma(&self) -> f64 {
        reparameterize(self.g, self.h).0
    }

    pub fn delta(&self) -> f64 {
        reparameterize(self.g, self.h).1
    }

    pub fn hamiltonian(&self, k: usize) -> Result<SquareRealMatrix> {
        build_loop_graph(k, self.g, self.h, self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Chain,
    Loop,
}

impl GraphKind {
    fn name(self) -> &'static str {
        match self {
            GraphKind::Chain => "chain",
            GraphKind::Loop => "loop",
        }
    }
}

/// Named real couplings; absent values mean zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couplings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

/// Serializable graph description:
/// `{"kind": "chain"|"loop", "K": int, "couplings": {"nu"|"g"|"h"|"z": number}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub kind: GraphKind,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default)]
    pub couplings: Couplings,
}

impl GraphSpec {
    pub fn chain(k: usize, nu: f64) -> Self {
        Self {
            kind: GraphKind::Chain,
            k,
            couplings: Couplings { nu: Some(nu), ..Couplings::default() },
        }
    }

    pub fn loop_graph(k: usize, g: f64, h: f64, z: f64) -> Self {
        Self {
            kind: GraphKind::Loop,
            k,
            couplings: Couplings { nu: None, g: Some(g), h: Some(h), z: Some(z) },
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("GraphSpec serializes")
    }

    /// Matrix dimension: `2K` for a chain, `2K + 2` for a loop.
    pub fn dim(&self) -> usize {
        match self.kind {
            GraphKind::Chain => 2 * self.k,
            GraphKind::Loop => 2 * self.k + 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.couplings;
        match self.kind {
            GraphKind::Chain => {
                if self.k == 0 {
                    return Err(Error::EmptyLattice);
                }
                for (name, v) in [("g", c.g), ("h", c.h), ("z", c.z)] {
                    if v.is_some() {
                        return Err(Error::UnexpectedCoupling { name, kind: self.kind.name() });
                    }
                }
            }
            GraphKind::Loop => {
                if self.k < 2 {
                    return Err(Error::LoopTooShort(self.k));
                }
                if c.nu.is_some() {
                    return Err(Error::UnexpectedCoupling { name: "nu", kind: self.kind.name() });
                }
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<SquareRealMatrix> {
        self.validate()?;
        let c = &self.couplings;
        match self.kind {
            GraphKind::Chain => build_coupled_chain(self.k, c.nu.unwrap_or(0.0)),
            GraphKind::Loop => build_loop_graph(
                self.k,
                c.g.unwrap_or(0.0),
                c.h.unwrap_or(0.0),
                c.z.unwrap_or(0.0),
            ),
        }
    }

    /// Undirected edges as node-index pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self.kind {
            GraphKind::Chain => (0..2 * self.k - 1).map(|i| (i, i + 1)).collect(),
            GraphKind::Loop => {
                let k = self.k;
                let mut e: Vec<(usize, usize)> = chain_edges(k).collect();
                e.extend([(k - 1, k), (k - 1, k + 1), (k, k + 2), (k + 1, k + 2)]);
                e.sort_unstable();
                e
            }
        }
    }

    /// Human-readable node labels in matrix order.
    pub fn node_labels(&self) -> Vec<String> {
        let k = self.k as i64;
        match self.kind {
            GraphKind::Chain => (-k + 1..=k).map(|i| format!("xi_{i}")).collect(),
            GraphKind::Loop => (-k..=-1)
                .map(|i| format!("x_{i}"))
                .chain(["x_0+".to_string(), "x_0-".to_string()])
                .chain((1..=k).map(|i| format!("x_{i}")))
                .collect(),
        }
    }
}
