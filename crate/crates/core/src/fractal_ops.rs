//! Level-m approximations of the Sierpiński gasket.
//!
//! Vertices live on a triangular lattice: lattice point `(a, b)` sits at
//! `(a + b/2, b·√3/2) / 2^m` in the plane, with corners `(0,0)`, `(2^m,0)`,
//! `(0,2^m)`. Every level-m edge carries conductance `(5/3)^m`, which makes the
//! energy forms compatible under restriction to coarser levels. Each cell
//! has measure `3^{−m}`, split equally among its three vertices.
//!
//! The gasket's Hausdorff dimension, `ln 3 / ln 2`, does not enter: the
//! measure is built directly from the self-similar cell masses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, DenseMatrix};
use crate::operator::OperatorDiscretization;
use crate::space::{estimate_exponent, HoelderEstimate, SampledSpace, SpaceDocument};

/// Deepest supported level (3282 vertices).
pub const MAX_LEVEL: u32 = 7;

/// Hölder exponent of domain functions with respect to the Euclidean metric.
pub fn euclidean_exponent() -> f64 {
    (5.0f64 / 3.0).ln() / 2.0f64.ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasketApproximation {
    level: u32,
    lattice: Vec<(i64, i64)>,
    cells: Vec<[usize; 3]>,
    conductance: f64,
}

impl GasketApproximation {
    pub fn new(level: u32) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::Capacity(format!("gasket level {level} exceeds {MAX_LEVEL}")));
        }
        let side = 1i64 << level;
        let mut index: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        let mut lattice = Vec::new();
        let mut intern = |p: (i64, i64), lattice: &mut Vec<(i64, i64)>| {
            *index.entry(p).or_insert_with(|| {
                lattice.push(p);
                lattice.len() - 1
            })
        };
        for corner in [(0, 0), (side, 0), (0, side)] {
            intern(corner, &mut lattice);
        }
        let mut origins = vec![(0i64, 0i64)];
        let mut size = side;
        while size > 1 {
            let half = size / 2;
            origins = origins
                .into_iter()
                .flat_map(|(a, b)| [(a, b), (a + half, b), (a, b + half)])
                .collect();
            size = half;
        }
        let cells = origins
            .into_iter()
            .map(|(a, b)| {
                [
                    intern((a, b), &mut lattice),
                    intern((a + 1, b), &mut lattice),
                    intern((a, b + 1), &mut lattice),
                ]
            })
            .collect();
        Ok(Self {
            level,
            lattice,
            cells,
            conductance: (5.0f64 / 3.0).powi(level as i32),
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn vertex_count(&self) -> usize {
        self.lattice.len()
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn conductance(&self) -> f64 {
        self.conductance
    }

    pub fn corner_ids(&self) -> [usize; 3] {
        [0, 1, 2]
    }

    pub fn lattice_point(&self, v: usize) -> (i64, i64) {
        self.lattice[v]
    }

    /// Vertex at a lattice point, if present.
    pub fn vertex_at(&self, p: (i64, i64)) -> Option<usize> {
        self.lattice.iter().position(|&q| q == p)
    }

    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        let scale = 1.0 / (1u64 << self.level) as f64;
        self.lattice
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (a as f64, b as f64);
                vec![(a + 0.5 * b) * scale, b * 3f64.sqrt() / 2.0 * scale]
            })
            .collect()
    }

    /// Every cell edge once; cells share vertices but never edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.cells
            .iter()
            .flat_map(|c| [(c[0], c[1]), (c[1], c[2]), (c[2], c[0])])
            .collect()
    }

    /// Graph Laplacian with conductance `(5/3)^m` on every edge.
    pub fn laplacian(&self) -> DenseMatrix {
        let n = self.vertex_count();
        let mut l = DenseMatrix::zeros(n, n);
        let c = self.conductance;
        for (a, b) in self.edges() {
            l[(a, a)] += c;
            l[(b, b)] += c;
            l[(a, b)] -= c;
            l[(b, a)] -= c;
        }
        l
    }

    /// `1/3` of each cell's `3^{−m}` to each of its vertices.
    pub fn mass_weights(&self) -> Vec<f64> {
        let share = 1.0 / (3.0 * self.cells.len() as f64);
        let mut w = vec![0.0; self.vertex_count()];
        for c in &self.cells {
            for &v in c {
                w[v] += share;
            }
        }
        w
    }

    fn ids(&self) -> Vec<String> {
        self.lattice.iter().map(|(a, b)| format!("({a},{b})")).collect()
    }
}

/// A gasket approximation with its operator and both metrics.
#[derive(Debug, Clone)]
pub struct GasketBuild {
    pub gasket: GasketApproximation,
    pub op: OperatorDiscretization,
    pub resistance_space: SampledSpace,
    pub euclidean_space: SampledSpace,
}

pub fn build_gasket(level: u32) -> Result<GasketBuild> {
    let gasket = GasketApproximation::new(level)?;
    let weights = gasket.mass_weights();
    let op = OperatorDiscretization::new(gasket.laplacian(), weights.clone(), 1, 0.5)?;
    let table = resistance_table(&gasket)?;
    let resistance_space = SampledSpace::new(gasket.ids(), Some(gasket.coordinates()), table, weights.clone())?;
    let euclidean_space = SampledSpace::from_coordinates(gasket.ids(), gasket.coordinates(), weights)?;
    Ok(GasketBuild {
        gasket,
        op,
        resistance_space,
        euclidean_space,
    })
}

/// Laplacian with row and column `ground` removed.
fn grounded(l: &DenseMatrix, ground: usize) -> DenseMatrix {
    let n = l.rows();
    let keep = |i: usize| if i < ground { i } else { i + 1 };
    DenseMatrix::from_fn(n - 1, n - 1, |i, j| l[(keep(i), keep(j))])
}

/// Effective resistance between `x` and `y`, by grounding `y` and solving.
pub fn effective_resistance(g: &GasketApproximation, x: usize, y: usize) -> Result<f64> {
    network_resistance(&g.laplacian(), x, y)
}

/// Effective resistance in any connected network given its Laplacian.
pub fn network_resistance(l: &DenseMatrix, x: usize, y: usize) -> Result<f64> {
    let n = l.rows();
    if x >= n || y >= n {
        return Err(Error::Dimension(format!("vertex out of range for {n} nodes")));
    }
    if x == y {
        return Ok(0.0);
    }
    let reduced = grounded(l, y);
    let xr = if x < y { x } else { x - 1 };
    let mut rhs = vec![0.0; n - 1];
    rhs[xr] = 1.0;
    let u = Cholesky::new(&reduced)?.solve(&rhs)?;
    Ok(u[xr])
}

/// All pairwise resistances, row-major: one grounded inverse `G`, then
/// `R(x,y) = G_xx + G_yy − 2G_xy`.
pub fn resistance_table(g: &GasketApproximation) -> Result<Vec<f64>> {
    let l = g.laplacian();
    let n = l.rows();
    let chol = Cholesky::new(&grounded(&l, 0))?;
    // green[i][j] for the nodes 1..n, node 0 is ground
    let mut green = vec![0.0; n * n];
    let mut rhs = vec![0.0; n - 1];
    for j in 0..n - 1 {
        rhs[j] = 1.0;
        let col = chol.solve(&rhs)?;
        rhs[j] = 0.0;
        for (i, v) in col.into_iter().enumerate() {
            green[(i + 1) * n + j + 1] = v;
        }
    }
    let mut r = vec![0.0; n * n];
    for x in 0..n {
        for y in x + 1..n {
            let v = (green[x * n + x] + green[y * n + y] - 2.0 * green[x * n + y]).max(0.0);
            r[x * n + y] = v;
            r[y * n + x] = v;
        }
    }
    Ok(r)
}

/// Schur complement of the level-(m+1) form onto the level-m vertices,
/// ordered as the level-m vertex list.
pub fn trace_to_coarser(fine: &GasketApproximation) -> Result<DenseMatrix> {
    if fine.level == 0 {
        return Err(Error::Domain("level 0 has no coarser level".into()));
    }
    let coarse = GasketApproximation::new(fine.level - 1)?;
    let keep: Vec<usize> = coarse
        .lattice
        .iter()
        .map(|&(a, b)| {
            fine.vertex_at((2 * a, 2 * b))
                .ok_or_else(|| Error::Contract("coarse vertex missing from the fine level".into()))
        })
        .collect::<Result<_>>()?;
    let l = fine.laplacian();
    let n = l.rows();
    let drop: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let lbb = DenseMatrix::from_fn(drop.len(), drop.len(), |i, j| l[(drop[i], drop[j])]);
    let chol = Cholesky::new(&lbb)?;
    let k = keep.len();
    let mut schur = DenseMatrix::from_fn(k, k, |i, j| l[(keep[i], keep[j])]);
    for j in 0..k {
        let col: Vec<f64> = drop.iter().map(|&b| l[(b, keep[j])]).collect();
        let x = chol.solve(&col)?;
        for i in 0..k {
            let s: f64 = drop.iter().zip(&x).map(|(&b, xv)| l[(keep[i], b)] * xv).sum();
            schur[(i, j)] -= s;
        }
    }
    Ok(schur)
}

/// Exponent estimates of `f` in the resistance metric (at `α = ½`) and the
/// Euclidean metric (at `α = ln(5/3)/ln 2`).
pub fn resistance_vs_euclidean_scan(b: &GasketBuild, f: &[f64]) -> Result<(HoelderEstimate, HoelderEstimate)> {
    let r = estimate_exponent(&b.resistance_space, f, 0.5, None)?;
    let e = estimate_exponent(&b.euclidean_space, f, euclidean_exponent(), None)?;
    Ok((r, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasketBlock {
    pub level: u32,
    pub conductance: f64,
    pub cells: Vec<[usize; 3]>,
}

/// Space JSON document with an extra `gasket` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasketDocument {
    #[serde(flatten)]
    pub space: SpaceDocument,
    pub gasket: GasketBlock,
}

impl GasketBuild {
    /// Export with the resistance metric.
    pub fn to_document(&self) -> GasketDocument {
        GasketDocument {
            space: SpaceDocument::from(&self.resistance_space),
            gasket: GasketBlock {
                level: self.gasket.level,
                conductance: self.gasket.conductance,
                cells: self.gasket.cells.clone(),
            },
        }
    }
}
