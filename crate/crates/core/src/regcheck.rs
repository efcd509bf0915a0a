//! Scans of Hölder constants over time grids, blow-up fits and verdicts.
//!
//! For each `t` the constant is
//! `C(t) = sup ‖p_t(x,·) − p_t(x′,·)‖ / d(x,x′)^α` over finite-distance
//! pairs. The blow-up power is fitted on the smallest-t half of the grid,
//! then `(C₁, C₂)` are fitted in the basis `{1, t^{−p*}}`.
//!
//! Verdict margins are policy: the fitted power may exceed the prediction by
//! at most [`POWER_MARGIN`], and the measured exponent may fall short of the
//! predicted one by at most [`EXPONENT_MARGIN`]. Being smoother than predicted
//! never fails.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{apply_generator_x, apply_generator_y, KernelMatrix};
use crate::linalg::DenseMatrix;
use crate::operator::OperatorDiscretization;
use crate::space::{
    estimate_exponent_with, least_squares_line, weighted_lr, HoelderEstimate, ProductView, SampledSpace,
};

pub const POWER_MARGIN: f64 = 0.2;
pub const EXPONENT_MARGIN: f64 = 0.15;

/// Base points kept per coordinate before a product scan is subsampled.
pub const JOINT_BASE_CAP: usize = 128;

/// Norm used on coordinate slices `p_t(x, ·)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NormChoice {
    Lr { r: f64 },
    Sup,
    /// `‖f‖ + ‖A f‖` in weighted L².
    Graph,
}

impl Default for NormChoice {
    fn default() -> Self {
        NormChoice::Lr { r: 2.0 }
    }
}

/// Declared bound: `C(t) ≲ C₁ + C₂ t^{−p*}` at exponent `α*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub exponent: f64,
    pub blow_up_power: f64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub t_grid: Vec<f64>,
    pub alpha: f64,
    #[serde(default)]
    pub norm: NormChoice,
    pub prediction: Prediction,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        validate_grid(&self.t_grid)?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if let NormChoice::Lr { r } = self.norm {
            if !(r >= 1.0 && r.is_finite()) {
                return Err(Error::Config(format!("Lebesgue exponent {r} must be finite and ≥ 1")));
            }
        }
        Ok(())
    }
}

/// At least 6 positive, strictly ascending times spanning two decades.
pub fn validate_grid(t: &[f64]) -> Result<()> {
    if t.len() < 6 {
        return Err(Error::Config(format!("time grid has {} points, need at least 6", t.len())));
    }
    if t.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Config("time grid entries must be positive and finite".into()));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("time grid must be strictly ascending".into()));
    }
    if t[t.len() - 1] / t[0] < 100.0 * (1.0 - 1e-12) {
        return Err(Error::Config("time grid must span at least two decades".into()));
    }
    Ok(())
}

/// `n` log-spaced times from `a` to `b`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                a
            } else if k == n - 1 {
                b
            } else {
                (la + (lb - la) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerTime {
    pub t: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Sup-norm constant: `sup_y` of the scalar seminorms of `x ↦ p_t(x, y)`.
    pub seminorm: f64,
    /// Fitted exponent of the coordinate map in the scan norm.
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowUpFit {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub p: f64,
    /// `‖C − fit‖₂ / ‖C‖₂` over the grid.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub power_margin: f64,
    pub exponent_margin: f64,
    pub measured_power: Option<f64>,
    /// Upper edge of `exponent_band`, the value compared with `α* − margin`.
    pub measured_exponent: Option<f64>,
    /// Smallest and largest per-time fitted exponent.
    pub exponent_band: Option<[f64; 2]>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn inconclusive(note: impl Into<String>) -> Self {
        Self {
            status: Status::Inconclusive,
            power_margin: POWER_MARGIN,
            exponent_margin: EXPONENT_MARGIN,
            measured_power: None,
            measured_exponent: None,
            exponent_band: None,
            notes: vec![note.into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoelderReport {
    pub instance: String,
    pub prediction: Prediction,
    pub alpha: f64,
    pub per_t: Vec<PerTime>,
    pub fit: Option<BlowUpFit>,
    pub verdict: Verdict,
    /// Pairs skipped because their distance is `+∞` (per time).
    pub excluded_infinite_pairs: usize,
}

impl HoelderReport {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "instance,t,C,seminorm,exponent,C1,C2,p,residual,status")?;
        let fit = self.fit.map_or_else(|| ",,,".to_string(), |f| format!("{},{},{},{}", f.c1, f.c2, f.p, f.residual));
        let status = serde_json::to_value(self.verdict.status)?;
        for row in &self.per_t {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.instance,
                row.t,
                row.c,
                row.seminorm,
                row.exponent.map_or(String::new(), |e| e.to_string()),
                fit,
                status.as_str().unwrap_or_default()
            )?;
        }
        Ok(())
    }
}

/// Least squares for `C(t) ≈ a·t^{−e₁} + b·t^{−e₂}`. Columns are scaled to
/// unit norm before solving the normal equations.
pub fn fit_two_term(t: &[f64], c: &[f64], e1: f64, e2: f64) -> Result<(f64, f64, f64)> {
    if t.len() != c.len() || t.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} times for {} values", t.len(), c.len())));
    }
    let b1: Vec<f64> = t.iter().map(|t| t.powf(-e1)).collect();
    let b2: Vec<f64> = t.iter().map(|t| t.powf(-e2)).collect();
    let n1 = b1.iter().map(|v| v * v).sum::<f64>().sqrt();
    let n2 = b2.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u: Vec<f64> = b1.iter().map(|v| v / n1).collect();
    let v: Vec<f64> = b2.iter().map(|v| v / n2).collect();
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let uv: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    let uc: f64 = u.iter().zip(c).map(|(a, b)| a * b).sum();
    let vc: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
    let det = uu * vv - uv * uv;
    if !(det > 1e-14) {
        return Err(Error::DegenerateFit("basis functions are numerically collinear on this grid".into()));
    }
    let a = (vv * uc - uv * vc) / det / n1;
    let b = (uu * vc - uv * uc) / det / n2;
    let num: f64 = t
        .iter()
        .zip(c)
        .map(|(t, c)| (c - a * t.powf(-e1) - b * t.powf(-e2)).powi(2))
        .sum();
    let den: f64 = c.iter().map(|c| c * c).sum();
    let residual = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok((a, b, residual))
}

/// Slope of `log C` against `log(1/t)` on the smallest-t half of the grid.
pub fn small_t_power(t: &[f64], c: &[f64]) -> Result<f64> {
    let half = t.len().div_ceil(2).max(2);
    let pts: Vec<(f64, f64)> = t[..half]
        .iter()
        .zip(&c[..half])
        .map(|(t, c)| ((1.0 / t).ln(), c.ln()))
        .collect();
    if pts.iter().any(|(_, y)| !y.is_finite()) {
        return Err(Error::DegenerateFit("nonpositive constant on the small-t half".into()));
    }
    Ok(least_squares_line(&pts).slope)
}

/// Fit and verdict for a completed set of per-time rows.
pub fn assess(per_t: &[PerTime], prediction: &Prediction) -> (Option<BlowUpFit>, Verdict) {
    let t: Vec<f64> = per_t.iter().map(|r| r.t).collect();
    let c: Vec<f64> = per_t.iter().map(|r| r.c).collect();
    if c.iter().any(|v| !v.is_finite()) {
        return (None, Verdict::inconclusive("non-finite Hölder constant on the grid"));
    }
    let p = match small_t_power(&t, &c) {
        Ok(p) => p,
        Err(e) => return (None, Verdict::inconclusive(e.to_string())),
    };
    let (c1, c2, residual) = match fit_two_term(&t, &c, 0.0, prediction.blow_up_power) {
        Ok(v) => v,
        Err(e) => return (None, Verdict::inconclusive(e.to_string())),
    };
    let fit = BlowUpFit { c1, c2, p, residual };
    let exponents: Vec<f64> = per_t.iter().filter_map(|r| r.exponent).collect();
    let mut notes = Vec::new();
    // exponents are one-sided guarantees: the band fails only when it lies
    // entirely below the prediction
    let exponent_band = exponents
        .iter()
        .fold(None, |b: Option<[f64; 2]>, &e| Some(b.map_or([e, e], |[lo, hi]| [lo.min(e), hi.max(e)])));
    let measured_exponent = exponent_band.map(|b| b[1]);
    let power_ok = p <= prediction.blow_up_power + POWER_MARGIN;
    if !power_ok {
        notes.push(format!(
            "fitted blow-up power {p:.4} exceeds {} + {POWER_MARGIN}",
            prediction.blow_up_power
        ));
    }
    let status = match measured_exponent {
        None => {
            notes.push("no pointwise exponent could be fitted".into());
            Status::Inconclusive
        }
        Some(e) if e < prediction.exponent - EXPONENT_MARGIN => {
            notes.push(format!(
                "largest per-time exponent {e:.4} below {} − {EXPONENT_MARGIN}",
                prediction.exponent
            ));
            Status::Fail
        }
        Some(_) if !power_ok => Status::Fail,
        Some(_) => Status::Pass,
    };
    (
        Some(fit),
        Verdict {
            status,
            power_margin: POWER_MARGIN,
            exponent_margin: EXPONENT_MARGIN,
            measured_power: Some(p),
            measured_exponent,
            exponent_band,
            notes,
        },
    )
}

/// Pairwise scan of the coordinate map `x ↦ p_t(x, ·)` for one kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateScan {
    pub estimate: HoelderEstimate,
    /// Same constant with the sup norm on slices.
    pub sup_constant: f64,
}

/// Scans every pair of rows of `k`; `op` is needed for the graph norm.
pub fn coordinate_scan(
    k: &KernelMatrix,
    norm: NormChoice,
    alpha: f64,
    op: Option<&OperatorDiscretization>,
) -> Result<CoordinateScan> {
    let w = k.weights();
    let n = k.dim();
    let ap = match norm {
        NormChoice::Graph => {
            let op = op.ok_or_else(|| Error::Config("graph norm needs an operator".into()))?;
            Some(apply_generator_y(k, op)?)
        }
        _ => None,
    };
    let mut sup_jump = vec![0.0; n * n];
    let mut diff = vec![0.0; n];
    let mut jump = |i: usize, j: usize| {
        let (ri, rj) = (k.row(i), k.row(j));
        let mut sup = 0.0f64;
        for ((d, a), b) in diff.iter_mut().zip(ri).zip(rj) {
            *d = a - b;
            sup = sup.max(d.abs());
        }
        sup_jump[i * n + j] = sup;
        match norm {
            NormChoice::Lr { r } => weighted_lr(w, &diff, r),
            NormChoice::Sup => sup,
            NormChoice::Graph => {
                let ap = ap.as_ref().expect("computed above");
                let mut s = 0.0;
                for ((wz, a), b) in w.iter().zip(ap.row(i)).zip(ap.row(j)) {
                    s += wz * (a - b) * (a - b);
                }
                weighted_lr(w, &diff, 2.0) + s.sqrt()
            }
        }
    };
    let estimate = estimate_exponent_with(k.space.as_ref(), alpha, None, &mut jump)?;
    let mut sup_constant = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let d = k.space.dist(i, j);
            if d.is_finite() && d > 0.0 {
                sup_constant = sup_constant.max(sup_jump[i * n + j] / d.powf(alpha));
            }
        }
    }
    Ok(CoordinateScan { estimate, sup_constant })
}

/// Runs the one-coordinate scan at every grid time and assesses the result.
pub fn scan_constants(
    instance: &str,
    mut k_provider: impl FnMut(f64) -> Result<KernelMatrix>,
    cfg: &ScanConfig,
    op: Option<&OperatorDiscretization>,
) -> Result<HoelderReport> {
    cfg.validate()?;
    let mut per_t = Vec::with_capacity(cfg.t_grid.len());
    let mut excluded = 0;
    let mut failure = None;
    for &t in &cfg.t_grid {
        let k = k_provider(t)?;
        match coordinate_scan(&k, cfg.norm, cfg.alpha, op) {
            Ok(scan) => {
                excluded = scan.estimate.infinite_pairs_excluded;
                per_t.push(PerTime {
                    t,
                    c: scan.estimate.seminorm_at_alpha,
                    seminorm: scan.sup_constant,
                    exponent: scan.estimate.fitted_exponent,
                });
            }
            Err(e @ (Error::UndefinedSeminorm | Error::Fit { .. } | Error::DegenerateFit(_))) => {
                failure = Some(e.to_string());
                per_t.push(PerTime {
                    t,
                    c: f64::NAN,
                    seminorm: f64::NAN,
                    exponent: None,
                });
            }
            Err(e) => return Err(e),
        }
    }
    let (fit, verdict) = match failure {
        Some(msg) => (None, Verdict::inconclusive(msg)),
        None => assess(&per_t, &cfg.prediction),
    };
    Ok(HoelderReport {
        instance: instance.to_string(),
        prediction: cfg.prediction.clone(),
        alpha: cfg.alpha,
        per_t,
        fit,
        verdict,
        excluded_infinite_pairs: excluded,
    })
}

/// Joint Hölder estimate on the product with the factorized bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointEstimate {
    pub estimate: HoelderEstimate,
    /// `max_y ‖p_{t/2}(·, y)‖_{L²}`.
    pub m_t: f64,
    /// One-coordinate L² constant of `p_{t/2}` at `α`.
    pub c_half: f64,
    pub factorized_bound: f64,
    pub bound_holds: bool,
    pub base_points_used: usize,
    pub subsampled: bool,
}

fn max_l2_slice(k: &KernelMatrix) -> f64 {
    let w = k.weights();
    let rows = (0..k.dim()).map(|i| weighted_lr(w, k.row(i), 2.0)).fold(0.0, f64::max);
    let t = k.values.transpose();
    let cols = (0..k.dim()).map(|j| weighted_lr(w, t.row(j), 2.0)).fold(0.0, f64::max);
    rows.max(cols)
}

fn joint_of(values: &DenseMatrix, k: &KernelMatrix, alpha: f64, cap: usize) -> Result<(HoelderEstimate, usize, bool)> {
    joint_estimate(values, k.space.as_ref(), alpha, cap)
}

/// Hölder estimate of `(x, y) ↦ values[(x, y)]` on the product sum metric,
/// with at most `cap` base points. Returns the base points used and whether
/// the space was subsampled.
pub fn joint_estimate(
    values: &DenseMatrix,
    space: &SampledSpace,
    alpha: f64,
    cap: usize,
) -> Result<(HoelderEstimate, usize, bool)> {
    if values.rows() != space.len() || values.cols() != space.len() {
        return Err(Error::Dimension("joint estimate needs a square matrix on the space".into()));
    }
    let view = ProductView::subsampled(space, cap);
    let m = view.sample().len();
    let est = estimate_exponent_with(&view, alpha, None, |p, q| {
        let (x, y) = view.split(p);
        let (x2, y2) = view.split(q);
        (values[(x, y)] - values[(x2, y2)]).abs()
    })?;
    Ok((est, m, m < space.len()))
}

/// Hölder estimate of `(x, y) ↦ p_t(x, y)` on the product sum metric,
/// compared with `M(t)·C(t/2)` computed from `k_half = p_{t/2}`.
pub fn joint_scan(k: &KernelMatrix, k_half: &KernelMatrix, alpha: f64) -> Result<JointEstimate> {
    joint_scan_capped(k, k_half, alpha, JOINT_BASE_CAP)
}

pub fn joint_scan_capped(k: &KernelMatrix, k_half: &KernelMatrix, alpha: f64, cap: usize) -> Result<JointEstimate> {
    if k.dim() != k_half.dim() {
        return Err(Error::Dimension("joint scan needs kernels on the same space".into()));
    }
    let (estimate, used, subsampled) = joint_of(&k.values, k, alpha, cap)?;
    let m_t = max_l2_slice(k_half);
    let c_half = coordinate_scan(k_half, NormChoice::Lr { r: 2.0 }, alpha, None)?
        .estimate
        .seminorm_at_alpha;
    let bound = m_t * c_half;
    Ok(JointEstimate {
        bound_holds: estimate.seminorm_at_alpha <= bound * (1.0 + 1e-6),
        estimate,
        m_t,
        c_half,
        factorized_bound: bound,
        base_points_used: used,
        subsampled,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderEstimate {
    pub estimate: HoelderEstimate,
    /// `max |A_xA_y p_t − ⟨A_y p_{t/2}(x,·), A_y p_{t/2}(y,·)⟩| / max |A_xA_y p_t|`.
    pub cross_check: f64,
    pub base_points_used: usize,
    pub subsampled: bool,
}

/// `A_xA_y p_t = W⁻¹K p_t K W⁻¹`, its joint Hölder estimate, and the
/// inner-product representation through `p_{t/2}`.
pub fn second_order_scan(
    k: &KernelMatrix,
    k_half: &KernelMatrix,
    op: &OperatorDiscretization,
    alpha: f64,
) -> Result<SecondOrderEstimate> {
    if !op.self_adjoint() || !k.self_adjoint {
        return Err(Error::Contract("second-order scan needs a self-adjoint generator".into()));
    }
    let ay = apply_generator_y(k, op)?;
    let mut wrapped = k.clone();
    wrapped.values = ay;
    let q = apply_generator_x(&wrapped, op)?;
    let half = apply_generator_y(k_half, op)?;
    let gram = half.scale_cols(k_half.weights()).matmul(&half.transpose())?;
    let cross_check = q.max_abs_diff(&gram) / q.max_abs();
    let (estimate, used, subsampled) = joint_of(&q, k, alpha, JOINT_BASE_CAP)?;
    Ok(SecondOrderEstimate {
        estimate,
        cross_check,
        base_points_used: used,
        subsampled,
    })
}

/// Largest relative increase `C(t_{k+1}) / C(t_k) − 1` along the grid; `≤ 0`
/// when `C` is non-increasing.
pub fn monotonicity_defect(per_t: &[PerTime]) -> f64 {
    per_t
        .windows(2)
        .map(|w| w[1].c / w[0].c - 1.0)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn prediction(p: f64) -> Prediction {
        Prediction {
            exponent: 1.0,
            blow_up_power: p,
            source: "test".into(),
        }
    }

    #[test]
    fn synthetic_blow_up_recovered() {
        let t = log_grid(0.01, 1.0, 9);
        let per_t: Vec<PerTime> = t
            .iter()
            .map(|&t| PerTime {
                t,
                c: 1.0 + 4.0 * t.powi(-2),
                seminorm: 0.0,
                exponent: Some(1.0),
            })
            .collect();
        let (fit, verdict) = assess(&per_t, &prediction(2.0));
        let fit = fit.unwrap();
        assert_abs_diff_eq!(fit.c1, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.c2, 4.0, epsilon = 1e-6);
        assert!((fit.p - 2.0).abs() < 0.01);
        assert_eq!(verdict.status, Status::Pass);
    }

    #[test]
    fn wave_basis_recovered() {
        let t = log_grid(0.01, 1.0, 8);
        let c: Vec<f64> = t.iter().map(|t| 3.0 / t + 5.0 / (t * t)).collect();
        let (a, b, r) = fit_two_term(&t, &c, 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(a, 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(b, 5.0, epsilon = 1e-8);
        assert!(r < 1e-12);
    }

    #[test]
    fn grid_rules() {
        assert!(validate_grid(&log_grid(0.01, 1.0, 6)).is_ok());
        assert!(validate_grid(&log_grid(0.01, 1.0, 5)).is_err());
        assert!(validate_grid(&log_grid(0.1, 1.0, 8)).is_err());
        assert!(validate_grid(&[0.01, 0.02, 0.02, 0.1, 0.5, 1.0]).is_err());
    }

    #[test]
    fn exponent_check_is_one_sided() {
        let t = log_grid(0.01, 1.0, 6);
        let rows = |e: f64| -> Vec<PerTime> {
            t.iter()
                .map(|&t| PerTime {
                    t,
                    c: 1.0 / t,
                    seminorm: 0.0,
                    exponent: Some(e),
                })
                .collect()
        };
        let mut pred = prediction(2.0);
        pred.exponent = 0.5;
        assert_eq!(assess(&rows(0.95), &pred).1.status, Status::Pass);
        pred.exponent = 0.99;
        assert_eq!(assess(&rows(0.7), &pred).1.status, Status::Fail);
        assert_eq!(assess(&rows(0.9), &pred).1.status, Status::Pass);
    }

    #[test]
    fn excessive_power_fails() {
        let t = log_grid(0.01, 1.0, 6);
        let rows: Vec<PerTime> = t
            .iter()
            .map(|&t| PerTime {
                t,
                c: t.powi(-3),
                seminorm: 0.0,
                exponent: Some(1.0),
            })
            .collect();
        assert_eq!(assess(&rows, &prediction(2.0)).1.status, Status::Fail);
    }

    #[test]
    fn non_finite_is_inconclusive() {
        let t = log_grid(0.01, 1.0, 6);
        let mut rows: Vec<PerTime> = t
            .iter()
            .map(|&t| PerTime {
                t,
                c: 1.0,
                seminorm: 0.0,
                exponent: Some(1.0),
            })
            .collect();
        rows[2].c = f64::NAN;
        assert_eq!(assess(&rows, &prediction(2.0)).1.status, Status::Inconclusive);
    }
}
