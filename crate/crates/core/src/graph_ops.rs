//! Metric graphs and their Schrödinger operators.
//!
//! Each edge is split into `ceil(ℓ/h)` equal subintervals and discretized with
//! piecewise-linear elements and lumped mass. Kirchhoff conditions come out of
//! assembly at shared vertices; δ-strengths go on the vertex diagonal;
//! Dirichlet vertices are removed from the unknowns. A magnetic potential
//! enters as a Peierls phase `θ = B(midpoint)·h_e` on each subinterval.
//!
//! Infinite graphs must be truncated by the caller.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, MAX_DIM};
use crate::operator::OperatorDiscretization;
use crate::space::SampledSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
    /// Electric potential sampled uniformly from `u` to `v`.
    pub q_samples: Option<Vec<f64>>,
    /// Magnetic potential sampled uniformly from `u` to `v`.
    pub b_samples: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    dirichlet: Vec<bool>,
    delta: Vec<f64>,
}

impl MetricGraph {
    pub fn new<S: Into<String>>(vertices: impl IntoIterator<Item = S>) -> Self {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let n = vertices.len();
        Self {
            vertices,
            edges: Vec::new(),
            dirichlet: vec![false; n],
            delta: vec![0.0; n],
        }
    }

    /// `[0, length]` as a single edge between vertices `a` and `b`.
    pub fn interval(length: f64) -> Result<Self> {
        let mut g = Self::new(["a", "b"]);
        g.add_edge(0, 1, length)?;
        Ok(g)
    }

    /// Star with `arms` edges of the given length joined at vertex `c`;
    /// leaves are `l0, l1, …`.
    pub fn star(arms: usize, length: f64) -> Result<Self> {
        let mut names = vec!["c".to_string()];
        names.extend((0..arms).map(|i| format!("l{i}")));
        let mut g = Self::new(names);
        for i in 0..arms {
            g.add_edge(0, i + 1, length)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize, length: f64) -> Result<usize> {
        let n = self.vertices.len();
        if u >= n || v >= n {
            return Err(Error::Graph(format!("edge ({u}, {v}) references a missing vertex")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Graph(format!("edge ({u}, {v}) has nonpositive length {length}")));
        }
        self.edges.push(Edge {
            u,
            v,
            length,
            q_samples: None,
            b_samples: None,
        });
        Ok(self.edges.len() - 1)
    }

    pub fn set_dirichlet(&mut self, v: usize) -> Result<()> {
        self.check_vertex(v)?;
        self.dirichlet[v] = true;
        Ok(())
    }

    pub fn set_delta(&mut self, v: usize, sigma: f64) -> Result<()> {
        self.check_vertex(v)?;
        if !sigma.is_finite() {
            return Err(Error::Graph(format!("δ-strength at vertex {v} is not finite")));
        }
        self.delta[v] = sigma;
        Ok(())
    }

    pub fn set_electric_potential(&mut self, edge: usize, samples: Vec<f64>) -> Result<()> {
        Self::check_samples(&samples, "electric potential")?;
        self.edge_mut(edge)?.q_samples = Some(samples);
        Ok(())
    }

    pub fn set_magnetic_potential(&mut self, edge: usize, samples: Vec<f64>) -> Result<()> {
        Self::check_samples(&samples, "magnetic potential")?;
        self.edge_mut(edge)?.b_samples = Some(samples);
        Ok(())
    }

    fn check_samples(samples: &[f64], what: &str) -> Result<()> {
        if samples.is_empty() || samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Graph(format!("{what} needs at least one finite sample")));
        }
        Ok(())
    }

    fn edge_mut(&mut self, e: usize) -> Result<&mut Edge> {
        let m = self.edges.len();
        self.edges
            .get_mut(e)
            .ok_or_else(|| Error::Graph(format!("edge {e} out of range ({m} edges)")))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertices.len() {
            return Err(Error::Graph(format!("vertex {v} out of range")));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_dirichlet(&self, v: usize) -> bool {
        self.dirichlet[v]
    }

    pub fn delta(&self, v: usize) -> f64 {
        self.delta[v]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn has_magnetic_potential(&self) -> bool {
        self.edges.iter().any(|e| e.b_samples.is_some())
    }

    /// Connectivity and positivity checks.
    pub fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::Graph("graph has no vertices".into()));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(Error::Graph(format!("edge {i} has nonpositive length {}", e.length)));
            }
        }
        let dist = self.vertex_distances();
        if let Some(v) = dist.iter().position(|d| d.is_infinite()) {
            return Err(Error::Disconnected(self.vertices[v].clone()));
        }
        Ok(())
    }

    /// Shortest-path distances from vertex 0 (used for the connectivity check).
    fn vertex_distances(&self) -> Vec<f64> {
        dijkstra(self.vertices.len(), &self.adjacency(), 0)
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.u].push((e.v, e.length));
            adj[e.v].push((e.u, e.length));
        }
        adj
    }

    /// All-pairs vertex distances.
    pub fn vertex_distance_table(&self) -> Result<Vec<Vec<f64>>> {
        self.validate()?;
        let adj = self.adjacency();
        Ok((0..self.vertices.len()).map(|s| dijkstra(self.vertices.len(), &adj, s)).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text)?;
        doc.into_graph()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDocument {
                    u: self.vertices[e.u].clone(),
                    v: self.vertices[e.v].clone(),
                    length: e.length,
                    q_samples: e.q_samples.clone().map(|s| s.into_iter().map(PotentialSample::Real).collect()),
                    b_samples: e.b_samples.clone(),
                })
                .collect(),
            dirichlet: (0..self.vertices.len())
                .filter(|&v| self.dirichlet[v])
                .map(|v| self.vertices[v].clone())
                .collect(),
            delta: (0..self.vertices.len())
                .filter(|&v| self.delta[v] != 0.0)
                .map(|v| (self.vertices[v].clone(), self.delta[v]))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(n: usize, adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem(0.0, source));
    while let Some(HeapItem(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapItem(nd, v));
            }
        }
    }
    dist
}

// ---------------------------------------------------------------------------
// JSON document

/// A potential sample: a real number, or `{re, im}` which is rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSample {
    Real(f64),
    Complex { re: f64, im: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub u: String,
    pub v: String,
    pub length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_samples: Option<Vec<PotentialSample>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_samples: Option<Vec<f64>>,
}

/// `{vertices: [id], edges: [{u, v, length, q_samples?, b_samples?}], dirichlet: [id], delta: {id: σ}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDocument>,
    #[serde(default)]
    pub dirichlet: Vec<String>,
    #[serde(default)]
    pub delta: BTreeMap<String, f64>,
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<MetricGraph> {
        let mut g = MetricGraph::new(self.vertices.clone());
        for (i, id) in self.vertices.iter().enumerate() {
            if self.vertices[..i].contains(id) {
                return Err(Error::Graph(format!("duplicate vertex id {id:?}")));
            }
        }
        let lookup = |id: &str| {
            g.vertex_index(id)
                .ok_or_else(|| Error::Graph(format!("unknown vertex id {id:?}")))
        };
        let mut resolved = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            resolved.push((lookup(&e.u)?, lookup(&e.v)?));
        }
        let dirichlet: Vec<usize> = self.dirichlet.iter().map(|id| lookup(id)).collect::<Result<_>>()?;
        let delta: Vec<(usize, f64)> = self
            .delta
            .iter()
            .map(|(id, s)| Ok((lookup(id)?, *s)))
            .collect::<Result<_>>()?;
        for ((u, v), e) in resolved.into_iter().zip(self.edges) {
            let idx = g.add_edge(u, v, e.length)?;
            if let Some(q) = e.q_samples {
                let real = q
                    .into_iter()
                    .map(|s| match s {
                        PotentialSample::Real(x) => Ok(x),
                        PotentialSample::Complex { re, im } if im == 0.0 => Ok(re),
                        PotentialSample::Complex { .. } => Err(Error::Graph(format!(
                            "edge {idx}: complex electric potentials are not supported"
                        ))),
                    })
                    .collect::<Result<Vec<f64>>>()?;
                g.set_electric_potential(idx, real)?;
            }
            if let Some(b) = e.b_samples {
                g.set_magnetic_potential(idx, b)?;
            }
        }
        for v in dirichlet {
            g.set_dirichlet(v)?;
        }
        for (v, s) in delta {
            g.set_delta(v, s)?;
        }
        g.validate()?;
        Ok(g)
    }
}

// ---------------------------------------------------------------------------
// Discretization

/// A point of the metric graph: a vertex, or a position measured from the
/// edge's `u` end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GraphPoint {
    Vertex(usize),
    OnEdge { edge: usize, position: f64 },
}

/// Where the discrete unknowns sit on the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMesh {
    /// Every mesh node, Dirichlet vertices included. Vertices come first.
    pub nodes: Vec<GraphPoint>,
    /// Mesh node index of each unknown.
    pub active: Vec<usize>,
    /// Unknown index of each mesh node, `None` for Dirichlet vertices.
    pub unknown_of: Vec<Option<usize>>,
    /// Mesh nodes along each edge from `u` to `v`, endpoints included.
    pub edge_nodes: Vec<Vec<usize>>,
    /// Subinterval length on each edge.
    pub edge_h: Vec<f64>,
}

impl GraphMesh {
    /// Unknown index of a graph vertex, if it is not Dirichlet.
    pub fn vertex_unknown(&self, v: usize) -> Option<usize> {
        self.unknown_of[v]
    }

    /// Unknown closest to a position on an edge (ties go to the lower position).
    pub fn nearest_unknown(&self, edge: usize, position: f64) -> Option<usize> {
        let h = self.edge_h[edge];
        let nodes = &self.edge_nodes[edge];
        let k = ((position / h).round() as usize).min(nodes.len() - 1);
        self.unknown_of[nodes[k]]
    }

    /// Unknown vector extended by zero to all mesh nodes.
    pub fn extend_by_zero(&self, f: &[f64]) -> Vec<f64> {
        self.unknown_of.iter().map(|u| u.map_or(0.0, |i| f[i])).collect()
    }
}

#[derive(Debug, Clone)]
pub struct GraphDiscretization {
    pub op: OperatorDiscretization,
    pub space: SampledSpace,
    pub mesh: GraphMesh,
}

fn sample_at(samples: &[f64], fraction: f64) -> f64 {
    if samples.len() == 1 {
        return samples[0];
    }
    let x = fraction.clamp(0.0, 1.0) * (samples.len() - 1) as f64;
    let k = (x.floor() as usize).min(samples.len() - 2);
    let r = x - k as f64;
    samples[k] * (1.0 - r) + samples[k + 1] * r
}

/// Per-edge diffusion coefficient and potential used by time-dependent forms.
/// `coefficient(edge, fraction)` and `potential(edge, fraction)` take the
/// position along the edge as a fraction of its length.
pub struct EdgeCoefficients<'a> {
    pub coefficient: &'a dyn Fn(usize, f64) -> f64,
    pub potential: &'a dyn Fn(usize, f64) -> f64,
}

/// Mesh layout without assembly.
pub fn build_mesh(g: &MetricGraph, h: f64) -> Result<GraphMesh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("mesh size {h} must be positive")));
    }
    g.validate()?;
    let nv = g.vertices.len();
    let mut nodes: Vec<GraphPoint> = (0..nv).map(GraphPoint::Vertex).collect();
    let mut edge_nodes = Vec::with_capacity(g.edges.len());
    let mut edge_h = Vec::with_capacity(g.edges.len());
    for (ei, e) in g.edges.iter().enumerate() {
        let n_e = (e.length / h).ceil().max(1.0) as usize;
        let he = e.length / n_e as f64;
        let mut along = vec![e.u];
        for k in 1..n_e {
            along.push(nodes.len());
            nodes.push(GraphPoint::OnEdge {
                edge: ei,
                position: he * k as f64,
            });
        }
        along.push(e.v);
        edge_nodes.push(along);
        edge_h.push(he);
    }
    let mut unknown_of = vec![None; nodes.len()];
    let mut active = Vec::new();
    for (i, slot) in unknown_of.iter_mut().enumerate() {
        let dirichlet = matches!(nodes[i], GraphPoint::Vertex(v) if g.dirichlet[v]);
        if !dirichlet {
            *slot = Some(active.len());
            active.push(i);
        }
    }
    if active.is_empty() {
        return Err(Error::Graph("every node is Dirichlet".into()));
    }
    if active.len() > MAX_DIM {
        return Err(Error::Capacity(format!(
            "{} unknowns at h = {h}, cap is {MAX_DIM}",
            active.len()
        )));
    }
    Ok(GraphMesh {
        nodes,
        active,
        unknown_of,
        edge_nodes,
        edge_h,
    })
}

/// Stiffness (real part, optional imaginary part) and lumped masses on the
/// unknowns for diffusion coefficient `c` and potential `V` given per edge.
pub fn assemble(
    g: &MetricGraph,
    mesh: &GraphMesh,
    coeff: &EdgeCoefficients<'_>,
) -> Result<(DenseMatrix, Option<DenseMatrix>, Vec<f64>)> {
    let n = mesh.active.len();
    let mut re = DenseMatrix::zeros(n, n);
    let mut im = g.has_magnetic_potential().then(|| DenseMatrix::zeros(n, n));
    let mut mass = vec![0.0; n];
    for (ei, e) in g.edges.iter().enumerate() {
        let he = mesh.edge_h[ei];
        let along = &mesh.edge_nodes[ei];
        let n_e = along.len() - 1;
        for k in 0..n_e {
            let (a, b) = (mesh.unknown_of[along[k]], mesh.unknown_of[along[k + 1]]);
            let mid = (k as f64 + 0.5) / n_e as f64;
            let c = (coeff.coefficient)(ei, mid);
            let kab = c / he;
            let fa = k as f64 / n_e as f64;
            let fb = (k + 1) as f64 / n_e as f64;
            let qa = (coeff.potential)(ei, fa) * he / 2.0;
            let qb = (coeff.potential)(ei, fb) * he / 2.0;
            if let Some(a) = a {
                re[(a, a)] += kab + qa;
                mass[a] += he / 2.0;
            }
            if let Some(b) = b {
                re[(b, b)] += kab + qb;
                mass[b] += he / 2.0;
            }
            if let (Some(a), Some(b)) = (a, b) {
                let theta = e.b_samples.as_ref().map_or(0.0, |s| sample_at(s, mid) * he);
                // K_ab = −c e^{iθ}/h, K_ba its conjugate
                re[(a, b)] -= kab * theta.cos();
                re[(b, a)] -= kab * theta.cos();
                if let Some(im) = im.as_mut() {
                    im[(a, b)] -= kab * theta.sin();
                    im[(b, a)] += kab * theta.sin();
                }
            }
        }
    }
    for v in 0..g.vertices.len() {
        if let Some(i) = mesh.unknown_of[v] {
            re[(i, i)] += g.delta[v];
        }
    }
    Ok((re, im, mass))
}

/// Splits every edge into `ceil(ℓ/h)` subintervals and assembles the
/// operator; the sampled space carries the exact shortest-path metric and
/// the lumped masses.
pub fn discretize_graph(g: &MetricGraph, h: f64) -> Result<GraphDiscretization> {
    let mesh = build_mesh(g, h)?;
    let potential = |e: usize, x: f64| g.edges[e].q_samples.as_ref().map_or(0.0, |s| sample_at(s, x));
    let one = |_: usize, _: f64| 1.0;
    let coeff = EdgeCoefficients {
        coefficient: &one,
        potential: &potential,
    };
    let (re, im, mass) = assemble(g, &mesh, &coeff)?;
    let mut op = OperatorDiscretization::new(re, mass.clone(), 1, 1.0)?;
    if let Some(im) = im {
        op = op.with_imaginary_part(im)?;
    }
    let space = mesh_space(g, &mesh, mass)?;
    Ok(GraphDiscretization { op, space, mesh })
}

/// Sampled space on the unknowns of a mesh with the given weights.
pub fn mesh_space(g: &MetricGraph, mesh: &GraphMesh, weights: Vec<f64>) -> Result<SampledSpace> {
    let points: Vec<GraphPoint> = mesh.active.iter().map(|&i| mesh.nodes[i]).collect();
    let dist = graph_metric(g, &points)?;
    let ids = points
        .iter()
        .map(|p| match *p {
            GraphPoint::Vertex(v) => g.vertices[v].clone(),
            GraphPoint::OnEdge { edge, position } => format!("e{edge}@{position}"),
        })
        .collect();
    SampledSpace::new(ids, None, dist, weights)
}

/// Exact shortest-path distances between arbitrary graph points, row-major.
pub fn graph_metric(g: &MetricGraph, points: &[GraphPoint]) -> Result<Vec<f64>> {
    let vd = g.vertex_distance_table()?;
    // each point as (edge endpoints with offsets) or a vertex
    let anchors: Vec<Vec<(usize, f64)>> = points
        .iter()
        .map(|p| match *p {
            GraphPoint::Vertex(v) => {
                g.check_vertex(v)?;
                Ok(vec![(v, 0.0)])
            }
            GraphPoint::OnEdge { edge, position } => {
                let e = g
                    .edges
                    .get(edge)
                    .ok_or_else(|| Error::Graph(format!("edge {edge} out of range")))?;
                if !(0.0..=e.length).contains(&position) {
                    return Err(Error::Graph(format!("position {position} outside edge {edge}")));
                }
                Ok(vec![(e.u, position), (e.v, e.length - position)])
            }
        })
        .collect::<Result<_>>()?;
    let n = points.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let mut d = f64::INFINITY;
            for &(a, da) in &anchors[i] {
                for &(b, db) in &anchors[j] {
                    d = d.min(da + vd[a][b] + db);
                }
            }
            if let (GraphPoint::OnEdge { edge: e1, position: s1 }, GraphPoint::OnEdge { edge: e2, position: s2 }) =
                (points[i], points[j])
            {
                if e1 == e2 {
                    d = d.min((s1 - s2).abs());
                }
            }
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    Ok(dist)
}

/// One-sided derivatives of a discrete function at a vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KirchhoffReport {
    /// Derivative pointing away from the vertex along each incident edge end.
    pub one_sided: Vec<f64>,
    /// `Σ` of the one-sided derivatives.
    pub derivative_sum: f64,
    /// `Σ ∂f − σ_v f(v)`; zero for an exact solution of the vertex condition.
    pub flux_residual: f64,
    /// Largest difference between two one-sided derivatives.
    pub max_pairwise_gap: f64,
}

/// Second-order one-sided differences `(−3f₀ + 4f₁ − f₂)/(2h)` on each edge
/// end at `v` (first order if the edge has a single subinterval).
pub fn kirchhoff_defect(g: &MetricGraph, d: &GraphDiscretization, f: &[f64], v: usize) -> Result<KirchhoffReport> {
    g.check_vertex(v)?;
    if g.dirichlet[v] {
        return Err(Error::Domain(format!("vertex {} is Dirichlet", g.vertices[v])));
    }
    if f.len() != d.mesh.active.len() {
        return Err(Error::Dimension(format!(
            "{} values on {} unknowns",
            f.len(),
            d.mesh.active.len()
        )));
    }
    let full = d.mesh.extend_by_zero(f);
    let mut one_sided = Vec::new();
    for (ei, e) in g.edges.iter().enumerate() {
        let along = &d.mesh.edge_nodes[ei];
        let he = d.mesh.edge_h[ei];
        let mut ends = Vec::new();
        if e.u == v {
            ends.push(along.clone());
        }
        if e.v == v {
            ends.push(along.iter().rev().copied().collect::<Vec<_>>());
        }
        for seq in ends {
            let f0 = full[seq[0]];
            let f1 = full[seq[1]];
            let deriv = if seq.len() >= 3 {
                (-3.0 * f0 + 4.0 * f1 - full[seq[2]]) / (2.0 * he)
            } else {
                (f1 - f0) / he
            };
            one_sided.push(deriv);
        }
    }
    let derivative_sum: f64 = one_sided.iter().sum();
    let fv = full[v];
    let mut gap = 0.0f64;
    for a in 0..one_sided.len() {
        for b in a + 1..one_sided.len() {
            gap = gap.max((one_sided[a] - one_sided[b]).abs());
        }
    }
    Ok(KirchhoffReport {
        derivative_sum,
        flux_residual: derivative_sum - g.delta[v] * fv,
        one_sided,
        max_pairwise_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_embed_eigen, weighted_symmetric_eigen};
    use approx::assert_abs_diff_eq;

    #[test]
    fn neumann_interval_has_constant_ground_state() {
        let g = MetricGraph::interval(1.0).unwrap();
        let d = discretize_graph(&g, 0.05).unwrap();
        let eig = weighted_symmetric_eigen(d.op.stiffness(), d.op.mass_weights(), 1e-12).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0], 0.0, epsilon = 1e-10);
        let v = eig.vector(0);
        for x in &v {
            assert_abs_diff_eq!(*x, v[0], epsilon = 1e-9);
        }
        for i in 0..d.op.dim() {
            let s: f64 = d.op.stiffness().row(i).iter().sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn subinterval_count_and_masses() {
        let mut g = MetricGraph::interval(1.0).unwrap();
        g.set_dirichlet(0).unwrap();
        g.set_dirichlet(1).unwrap();
        let d = discretize_graph(&g, 0.3).unwrap();
        // ceil(1/0.3) = 4 subintervals, 3 interior unknowns
        assert_eq!(d.op.dim(), 3);
        assert_abs_diff_eq!(d.mesh.edge_h[0], 0.25);
        assert_eq!(d.op.mass_weights(), &[0.25; 3]);
        assert_abs_diff_eq!(d.space.dist(0, 2), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn metric_examples() {
        let g = MetricGraph::star(3, 1.0).unwrap();
        let d = graph_metric(&g, &[GraphPoint::Vertex(1), GraphPoint::Vertex(2)]).unwrap();
        assert_eq!(d[1], 2.0);
        let d = graph_metric(
            &g,
            &[
                GraphPoint::OnEdge { edge: 0, position: 0.2 },
                GraphPoint::OnEdge { edge: 0, position: 0.7 },
            ],
        )
        .unwrap();
        assert_abs_diff_eq!(d[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn triangle_midpoints() {
        let mut g = MetricGraph::new(["a", "b", "c"]);
        g.add_edge(0, 1, 1.0).unwrap();
        g.add_edge(1, 2, 1.0).unwrap();
        g.add_edge(2, 0, 1.0).unwrap();
        let d = graph_metric(
            &g,
            &[
                GraphPoint::OnEdge { edge: 0, position: 0.5 },
                GraphPoint::OnEdge { edge: 1, position: 0.5 },
            ],
        )
        .unwrap();
        assert_eq!(d[1], 1.0);
    }

    #[test]
    fn validation_errors() {
        let mut g = MetricGraph::new(["a", "b", "c"]);
        g.add_edge(0, 1, 1.0).unwrap();
        assert!(matches!(discretize_graph(&g, 0.1), Err(Error::Disconnected(_))));
        assert!(g.add_edge(1, 2, 0.0).is_err());
        assert!(g.add_edge(1, 2, -1.0).is_err());
        let json = r#"{"vertices":["a","b"],"edges":[{"u":"a","v":"b","length":1,"q_samples":[{"re":1,"im":2}]}]}"#;
        assert!(MetricGraph::from_json(json).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut g = MetricGraph::star(3, 1.0).unwrap();
        g.set_dirichlet(1).unwrap();
        g.set_delta(0, 1.5).unwrap();
        g.set_electric_potential(2, vec![0.0, 1.0]).unwrap();
        let text = serde_json::to_string(&g.to_document()).unwrap();
        assert_eq!(MetricGraph::from_json(&text).unwrap(), g);
    }

    #[test]
    fn constant_function_has_no_defect() {
        let g = MetricGraph::star(3, 1.0).unwrap();
        let d = discretize_graph(&g, 0.1).unwrap();
        let r = kirchhoff_defect(&g, &d, &vec![2.0; d.op.dim()], 0).unwrap();
        assert_eq!(r.one_sided.len(), 3);
        assert!(r.derivative_sum.abs() < 1e-12);
        assert!(r.max_pairwise_gap < 1e-12);
    }

    #[test]
    fn defect_refuses_dirichlet_vertex() {
        let mut g = MetricGraph::star(3, 1.0).unwrap();
        g.set_dirichlet(1).unwrap();
        let d = discretize_graph(&g, 0.1).unwrap();
        assert!(matches!(
            kirchhoff_defect(&g, &d, &vec![0.0; d.op.dim()], 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn magnetic_potential_gauges_away_on_a_tree() {
        let mut g = MetricGraph::star(3, 1.0).unwrap();
        g.set_dirichlet(1).unwrap();
        let d0 = discretize_graph(&g, 0.1).unwrap();
        g.set_magnetic_potential(0, vec![1.0, 3.0]).unwrap();
        g.set_magnetic_potential(2, vec![-2.0]).unwrap();
        let d1 = discretize_graph(&g, 0.1).unwrap();
        let e0 = weighted_symmetric_eigen(d0.op.stiffness(), d0.op.mass_weights(), 1e-12).unwrap();
        let emb = d1.op.real_embedding().unwrap();
        let e1 = weighted_symmetric_eigen(emb.stiffness(), emb.mass_weights(), 1e-12).unwrap();
        for (k, lam) in e0.eigenvalues.iter().enumerate() {
            assert_abs_diff_eq!(*lam, e1.eigenvalues[2 * k], epsilon = 1e-8);
            assert_abs_diff_eq!(*lam, e1.eigenvalues[2 * k + 1], epsilon = 1e-8);
        }
        // the unweighted embedding is still Hermitian-structured
        assert!(hermitian_embed_eigen(d1.op.stiffness(), d1.op.stiffness_imag().unwrap()).is_ok());
    }
}
