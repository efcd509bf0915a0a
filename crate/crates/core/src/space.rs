//! Sampled generalized metric measure spaces and Hölder estimates on them.
//!
//! A [`SampledSpace`] is a finite quadrature proxy: points, a pairwise
//! distance table whose entries may be `+∞`, and positive weights. Distances
//! are stored as `f64`; [`INFINITE`] is the sentinel for points that cannot
//! be joined (for example across the two copies of a disjoint union).

use std::collections::BTreeMap;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::OperatorDiscretization;

/// Distance between points in different components.
pub const INFINITE: f64 = f64::INFINITY;

/// Product spaces larger than this are refused by [`product_sum_metric`].
pub const PRODUCT_CAP: usize = 4096;

/// Logarithmic bins per decade used by the exponent fit.
pub const BINS_PER_DECADE: f64 = 12.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpace {
    ids: Vec<String>,
    coords: Option<Vec<Vec<f64>>>,
    dist: Vec<f64>,
    weights: Vec<f64>,
}

impl SampledSpace {
    pub fn new(
        ids: Vec<String>,
        coords: Option<Vec<Vec<f64>>>,
        dist: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let n = ids.len();
        if weights.len() != n || dist.len() != n * n {
            return Err(Error::InvalidSpace(format!(
                "{n} points, {} weights, {} distance entries",
                weights.len(),
                dist.len()
            )));
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(Error::InvalidSpace("coordinate count differs from point count".into()));
            }
        }
        if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidSpace(format!("weight of point {i} is not positive and finite")));
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::InvalidSpace(format!("nonzero self-distance at point {i}")));
            }
            for j in i + 1..n {
                let d = dist[i * n + j];
                if d.is_nan() || d < 0.0 {
                    return Err(Error::InvalidSpace(format!("invalid distance at ({i}, {j})")));
                }
                if d != dist[j * n + i] {
                    return Err(Error::InvalidSpace(format!("asymmetric distance at ({i}, {j})")));
                }
            }
        }
        Ok(Self {
            ids,
            coords,
            dist,
            weights,
        })
    }

    /// Euclidean distances between the given coordinates.
    pub fn from_coordinates(ids: Vec<String>, coords: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let n = coords.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = euclidean(&coords[i], &coords[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Self::new(ids, Some(coords), dist, weights)
    }

    /// Uniform grid on `[a, b]` with `n` points, each weighted `(b − a)/n`.
    pub fn uniform_interval(a: f64, b: f64, n: usize) -> Result<Self> {
        let h = if n > 1 { (b - a) / (n - 1) as f64 } else { 0.0 };
        let coords = (0..n).map(|i| vec![a + h * i as f64]).collect();
        let ids = (0..n).map(|i| format!("x{i}")).collect();
        Self::from_coordinates(ids, coords, vec![(b - a).abs() / n as f64; n])
    }

    pub fn empty() -> Self {
        Self {
            ids: Vec::new(),
            coords: None,
            dist: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest finite pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().filter(|d| d.is_finite()).fold(0.0, |m, &d| m.max(d))
    }

    /// Checks the triangle inequality on every finite triple, allowing `tol`
    /// relative slack. Returns the worst violation found.
    pub fn check_triangle(&self, tol: f64) -> Result<f64> {
        let n = self.len();
        let scale = self.diameter().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dij = self.dist(i, j);
                if !dij.is_finite() {
                    continue;
                }
                for k in 0..n {
                    let excess = dij - self.dist(i, k) - self.dist(k, j);
                    worst = worst.max(excess);
                }
            }
        }
        if worst > tol * scale {
            return Err(Error::InvalidSpace(format!("triangle inequality violated by {worst:e}")));
        }
        Ok(worst.max(0.0))
    }

    /// Restriction to the listed points, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Self {
        let n = self.len();
        let m = indices.len();
        let mut dist = vec![0.0; m * m];
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                dist[a * m + b] = self.dist[i * n + j];
            }
        }
        Self {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            coords: self.coords.as_ref().map(|c| indices.iter().map(|&i| c[i].clone()).collect()),
            dist,
            weights: indices.iter().map(|&i| self.weights[i]).collect(),
        }
    }

    /// Same points with a different metric.
    pub fn with_distances(&self, dist: Vec<f64>) -> Result<Self> {
        Self::new(self.ids.clone(), self.coords.clone(), dist, self.weights.clone())
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Disjoint union: distances inside each copy are kept, every cross-copy
/// distance is [`INFINITE`], weights are concatenated.
pub fn disjoint_union(a: &SampledSpace, b: &SampledSpace) -> SampledSpace {
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let mut dist = vec![INFINITE; n * n];
    for i in 0..na {
        for j in 0..na {
            dist[i * n + j] = a.dist(i, j);
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            dist[(na + i) * n + na + j] = b.dist(i, j);
        }
    }
    let coords = match (&a.coords, &b.coords) {
        (Some(ca), Some(cb)) => Some(ca.iter().chain(cb).cloned().collect()),
        (Some(ca), None) if nb == 0 => Some(ca.clone()),
        (None, Some(cb)) if na == 0 => Some(cb.clone()),
        _ => None,
    };
    let ids = if na == 0 || nb == 0 {
        a.ids.iter().chain(&b.ids).cloned().collect()
    } else {
        a.ids
            .iter()
            .map(|id| format!("{id}#1"))
            .chain(b.ids.iter().map(|id| format!("{id}#2")))
            .collect()
    };
    SampledSpace {
        ids,
        coords,
        dist,
        weights: a.weights.iter().chain(&b.weights).copied().collect(),
    }
}

/// `X × X` with the sum metric and product weights. Point `k` is the pair
/// `(k / n, k % n)`.
pub fn product_sum_metric(s: &SampledSpace) -> Result<SampledSpace> {
    let n = s.len();
    let m = n * n;
    if m > PRODUCT_CAP {
        return Err(Error::Capacity(format!(
            "product of {n} points has {m} points, cap is {PRODUCT_CAP}"
        )));
    }
    let mut dist = vec![0.0; m * m];
    for p in 0..m {
        let (x, y) = (p / n, p % n);
        for q in 0..m {
            let (x2, y2) = (q / n, q % n);
            dist[p * m + q] = s.dist(x, x2) + s.dist(y, y2);
        }
    }
    let mut ids = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for x in 0..n {
        for y in 0..n {
            ids.push(format!("({},{})", s.ids[x], s.ids[y]));
            weights.push(s.weights[x] * s.weights[y]);
        }
    }
    Ok(SampledSpace {
        ids,
        coords: None,
        dist,
        weights,
    })
}

/// Anything that can report distances between indexed points.
pub trait PairMetric {
    fn len(&self) -> usize;
    fn distance(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let v = self.distance(i, j);
                if v.is_finite() {
                    d = d.max(v);
                }
            }
        }
        d
    }
}

impl PairMetric for SampledSpace {
    fn len(&self) -> usize {
        self.ids.len()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist(i, j)
    }

    fn diameter(&self) -> f64 {
        SampledSpace::diameter(self)
    }
}

/// Lazy sum-metric view on `S × S` restricted to a subsample of base points;
/// nothing of size `n²×n²` is materialized.
pub struct ProductView<'a> {
    base: &'a SampledSpace,
    sample: Vec<usize>,
}

impl<'a> ProductView<'a> {
    pub fn new(base: &'a SampledSpace, sample: Vec<usize>) -> Self {
        Self { base, sample }
    }

    /// Keeps at most `max_points` base points, evenly spaced in index order.
    pub fn subsampled(base: &'a SampledSpace, max_points: usize) -> Self {
        Self::new(base, even_subsample(base.len(), max_points))
    }

    pub fn sample(&self) -> &[usize] {
        &self.sample
    }

    /// Base indices `(x, y)` of product point `k`.
    pub fn split(&self, k: usize) -> (usize, usize) {
        let m = self.sample.len();
        (self.sample[k / m], self.sample[k % m])
    }
}

impl PairMetric for ProductView<'_> {
    fn len(&self) -> usize {
        self.sample.len() * self.sample.len()
    }

    fn distance(&self, p: usize, q: usize) -> f64 {
        let (x, y) = self.split(p);
        let (x2, y2) = self.split(q);
        self.base.dist(x, x2) + self.base.dist(y, y2)
    }

    fn diameter(&self) -> f64 {
        let m = self.sample.len();
        let mut d = 0.0f64;
        for a in 0..m {
            for b in a + 1..m {
                let v = self.base.dist(self.sample[a], self.sample[b]);
                if v.is_finite() {
                    d = d.max(v);
                }
            }
        }
        2.0 * d
    }
}

/// `min(n, max_points)` indices spread evenly over `0..n`, always keeping both ends.
pub fn even_subsample(n: usize, max_points: usize) -> Vec<usize> {
    if n <= max_points || max_points < 2 {
        return (0..n.min(max_points)).collect();
    }
    let mut out: Vec<usize> = (0..max_points)
        .map(|k| ((k as f64) * (n - 1) as f64 / (max_points - 1) as f64).round() as usize)
        .collect();
    out.dedup();
    out
}

/// Outcome of a pairwise scan.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairScan {
    /// `sup |Δf| / d^α` over pairs at finite nonzero distance.
    pub seminorm: f64,
    pub finite_pairs: usize,
    pub infinite_pairs: usize,
    /// Distinct points at distance zero; excluded from the seminorm.
    pub zero_distance_pairs: usize,
    /// Largest value jump across a zero-distance pair (a discretization diagnostic).
    pub zero_distance_max_jump: f64,
    pub argmax: Option<(usize, usize)>,
}

/// Scans every unordered pair once in row-major order. `jump(i, j)` returns
/// `‖f(x_i) − f(x_j)‖` in whatever target norm applies. Ties keep the
/// lowest index pair.
pub fn scan_pairs<M: PairMetric + ?Sized>(
    metric: &M,
    alpha: f64,
    mut jump: impl FnMut(usize, usize) -> f64,
) -> PairScan {
    let n = metric.len();
    let mut scan = PairScan::default();
    for i in 0..n {
        for j in i + 1..n {
            let d = metric.distance(i, j);
            if !d.is_finite() {
                scan.infinite_pairs += 1;
                continue;
            }
            if d == 0.0 {
                scan.zero_distance_pairs += 1;
                scan.zero_distance_max_jump = scan.zero_distance_max_jump.max(jump(i, j));
                continue;
            }
            scan.finite_pairs += 1;
            let q = jump(i, j) / d.powf(alpha);
            if scan.argmax.is_none() || q > scan.seminorm {
                scan.seminorm = q;
                scan.argmax = Some((i, j));
            }
        }
    }
    scan
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("Hölder exponent {alpha} outside (0, 1]")));
    }
    Ok(())
}

/// `sup_{x ≠ x'} |f(x) − f(x')| / d(x, x')^α`; pairs at infinite or zero
/// distance are skipped.
pub fn hoelder_seminorm(s: &SampledSpace, f: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if f.len() != s.len() {
        return Err(Error::Dimension(format!("{} values on {} points", f.len(), s.len())));
    }
    let scan = scan_pairs(s, alpha, |i, j| (f[i] - f[j]).abs());
    if scan.finite_pairs == 0 {
        return Err(Error::UndefinedSeminorm);
    }
    Ok(scan.seminorm)
}

/// Seminorm plus a log–log fit of the local modulus of continuity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoelderEstimate {
    pub alpha: f64,
    pub seminorm_at_alpha: f64,
    /// `None` when the function is constant on every bin.
    pub fitted_exponent: Option<f64>,
    pub fit_stderr: Option<f64>,
    pub bins_used: usize,
    pub cutoff: f64,
    pub finite_pairs: usize,
    pub infinite_pairs_excluded: usize,
    pub zero_distance_pairs: usize,
}

impl HoelderEstimate {
    pub fn exponent_defined(&self) -> bool {
        self.fitted_exponent.is_some()
    }
}

/// Scalar-function exponent estimate; see [`estimate_exponent_with`].
pub fn estimate_exponent(s: &SampledSpace, f: &[f64], alpha: f64, cutoff: Option<f64>) -> Result<HoelderEstimate> {
    if f.len() != s.len() {
        return Err(Error::Dimension(format!("{} values on {} points", f.len(), s.len())));
    }
    estimate_exponent_with(s, alpha, cutoff, |i, j| (f[i] - f[j]).abs())
}

/// Bins pairs with `0 < d ≤ cutoff` into [`BINS_PER_DECADE`] logarithmic
/// bins counted down from the cutoff, takes the largest jump per bin, and
/// regresses `log sup|Δf|` on `log d` (largest distance seen in the bin).
/// The slope is the fitted exponent. The cutoff defaults to a quarter of the
/// diameter. The seminorm is taken over all finite pairs at `alpha`.
pub fn estimate_exponent_with<M: PairMetric + ?Sized>(
    metric: &M,
    alpha: f64,
    cutoff: Option<f64>,
    mut jump: impl FnMut(usize, usize) -> f64,
) -> Result<HoelderEstimate> {
    check_alpha(alpha)?;
    let cutoff = match cutoff {
        Some(c) if c > 0.0 => c,
        Some(c) => return Err(Error::Domain(format!("cutoff {c} must be positive"))),
        None => metric.diameter() / 4.0,
    };
    // bin index -> (sup jump, largest distance)
    let mut bins: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    let scan = scan_pairs(metric, alpha, |i, j| {
        let v = jump(i, j);
        let d = metric.distance(i, j);
        if d > 0.0 && d <= cutoff {
            // slack keeps distances equal up to rounding in one bin
            let k = (BINS_PER_DECADE * (cutoff / d).log10() + 1e-9).floor().max(0.0) as u64;
            let e = bins.entry(k).or_insert((0.0, 0.0));
            e.0 = e.0.max(v);
            e.1 = e.1.max(d);
        }
        v
    });
    if scan.finite_pairs == 0 {
        return Err(Error::UndefinedSeminorm);
    }
    if bins.len() < 3 && scan.seminorm > 0.0 {
        return Err(Error::Fit { bins: bins.len() });
    }
    let points: Vec<(f64, f64)> = bins
        .values()
        .filter(|(v, _)| *v > 0.0)
        .map(|&(v, d)| (d.ln(), v.ln()))
        .collect();
    let base = HoelderEstimate {
        alpha,
        seminorm_at_alpha: scan.seminorm,
        fitted_exponent: None,
        fit_stderr: None,
        bins_used: points.len(),
        cutoff,
        finite_pairs: scan.finite_pairs,
        infinite_pairs_excluded: scan.infinite_pairs,
        zero_distance_pairs: scan.zero_distance_pairs,
    };
    if points.is_empty() && scan.seminorm == 0.0 {
        return Ok(base);
    }
    if points.len() < 3 {
        return Err(Error::Fit { bins: points.len() });
    }
    let line = least_squares_line(&points);
    Ok(HoelderEstimate {
        fitted_exponent: Some(line.slope),
        fit_stderr: Some(line.slope_stderr),
        ..base
    })
}

/// Ordinary least-squares line through `(x, y)` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn least_squares_line(points: &[(f64, f64)]) -> LineFit {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ssr: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let slope_stderr = if points.len() > 2 && sxx > 0.0 {
        (ssr / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LineFit {
        slope,
        intercept,
        slope_stderr,
    }
}

/// Which norm measures the distance between two functions on the space.
#[derive(Debug, Clone, Copy)]
pub enum NormSpec<'a> {
    /// `(Σ w_i |f_i − g_i|^r)^{1/r}`, `r ≥ 1`.
    Lr(f64),
    Sup,
    /// `‖h‖ + ‖A h‖` in weighted L², with `A` the operator's generator.
    Graph(&'a OperatorDiscretization),
}

impl NormSpec<'_> {
    pub fn validate(&self, len: usize) -> Result<()> {
        match self {
            NormSpec::Lr(r) if !(*r >= 1.0 && r.is_finite()) => {
                Err(Error::Domain(format!("Lebesgue exponent {r} must be finite and ≥ 1")))
            }
            NormSpec::Graph(op) if op.dim() != len => Err(Error::Dimension(format!(
                "graph-norm operator of order {} on {len} points",
                op.dim()
            ))),
            _ => Ok(()),
        }
    }

    /// Norm of `h` with respect to `weights`.
    pub fn norm(&self, weights: &[f64], h: &[f64]) -> Result<f64> {
        self.validate(h.len())?;
        if weights.len() != h.len() {
            return Err(Error::Dimension(format!("{} weights, {} values", weights.len(), h.len())));
        }
        Ok(match *self {
            NormSpec::Lr(r) => weighted_lr(weights, h, r),
            NormSpec::Sup => h.iter().fold(0.0, |m, v| m.max(v.abs())),
            NormSpec::Graph(op) => {
                let ah = op.apply_generator(h)?;
                weighted_lr(weights, h, 2.0) + weighted_lr(weights, &ah, 2.0)
            }
        })
    }
}

pub fn weighted_lr(weights: &[f64], h: &[f64], r: f64) -> f64 {
    if r == 2.0 {
        return weights.iter().zip(h).map(|(w, v)| w * v * v).sum::<f64>().sqrt();
    }
    weights
        .iter()
        .zip(h)
        .map(|(w, v)| w * v.abs().powf(r))
        .sum::<f64>()
        .powf(1.0 / r)
}

/// Distance `‖f − g‖` in the requested norm on the space's weights.
pub fn norm_distance(s: &SampledSpace, spec: NormSpec<'_>, f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != s.len() || g.len() != s.len() {
        return Err(Error::Dimension(format!(
            "vectors of length {} and {} on {} points",
            f.len(),
            g.len(),
            s.len()
        )));
    }
    let diff: Vec<f64> = f.iter().zip(g).map(|(a, b)| a - b).collect();
    spec.norm(&s.weights, &diff)
}

// ---------------------------------------------------------------------------
// JSON document

/// A distance table entry: a finite number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistEntry(pub f64);

impl Serialize for DistEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for DistEntry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EntryVisitor;

        impl Visitor<'_> for EntryVisitor {
            type Value = DistEntry;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a non-negative number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<DistEntry, E> {
                Ok(DistEntry(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<DistEntry, E> {
                Ok(DistEntry(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<DistEntry, E> {
                Ok(DistEntry(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<DistEntry, E> {
                if v == "inf" {
                    Ok(DistEntry(INFINITE))
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(EntryVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coord: Option<Vec<f64>>,
}

/// Serialized form: `{points: [{id, coord?}], dist: [...row-major...], weights: [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub points: Vec<PointRecord>,
    pub dist: Vec<DistEntry>,
    pub weights: Vec<f64>,
}

impl From<&SampledSpace> for SpaceDocument {
    fn from(s: &SampledSpace) -> Self {
        let points = s
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| PointRecord {
                id: id.clone(),
                coord: s.coords.as_ref().map(|c| c[i].clone()),
            })
            .collect();
        Self {
            points,
            dist: s.dist.iter().map(|&d| DistEntry(d)).collect(),
            weights: s.weights.clone(),
        }
    }
}

impl TryFrom<SpaceDocument> for SampledSpace {
    type Error = Error;

    fn try_from(doc: SpaceDocument) -> Result<Self> {
        let has_coords = doc.points.iter().any(|p| p.coord.is_some());
        if has_coords && doc.points.iter().any(|p| p.coord.is_none()) {
            return Err(Error::InvalidSpace("coordinates must be given for all points or none".into()));
        }
        let coords = has_coords.then(|| doc.points.iter().map(|p| p.coord.clone().unwrap_or_default()).collect());
        let ids = doc.points.into_iter().map(|p| p.id).collect();
        SampledSpace::new(ids, coords, doc.dist.into_iter().map(|d| d.0).collect(), doc.weights)
    }
}

impl SampledSpace {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SpaceDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpaceDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}
