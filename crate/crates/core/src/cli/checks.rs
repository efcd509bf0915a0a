//! Named checks: catalogue, typed parameters, and runners.

use std::f64::consts::PI;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::scenario::{Kind, Model, PointRef, StaticModel};
use crate::damped_wave::{block_symmetry_residual, mode_exponential, mode_matrix, wave_bound_scan};
use crate::error::{Error, Result};
use crate::fractal_ops::{effective_resistance, trace_to_coarser, GasketApproximation};
use crate::graph_ops::kirchhoff_defect;
use crate::kernel::{chapman_kolmogorov_residual, heat_kernel, symmetry_residual, time_derivative_check, KernelMatrix};
use crate::linalg::{expm_oracle, DenseMatrix};
use crate::nonauto::{
    autonomous_reference, cocycle_residual, contractivity_defect, ground_state, nonauto_kernel_scan, propagate,
    richardson_ratio, FormFamily,
};
use crate::regcheck::{joint_scan, log_grid, scan_constants, second_order_scan, NormChoice, Prediction, ScanConfig, Status};
use crate::space::estimate_exponent;

pub struct CatalogueEntry {
    pub name: &'static str,
    pub anchor: &'static str,
    pub applies_to: &'static [Kind],
    pub summary: &'static str,
}

const STATIC: &[Kind] = &[Kind::Graph, Kind::Gasket];
const ALL: &[Kind] = &[Kind::Graph, Kind::Gasket, Kind::Wave, Kind::Nonauto];

/// Every check, in report order.
pub const CATALOGUE: &[CatalogueEntry] = &[
    CatalogueEntry {
        name: "spectrum",
        anchor: "discrete spectrum",
        applies_to: ALL,
        summary: "lowest eigenvalues against reference values or the Dirichlet interval (kπ/L)²",
    },
    CatalogueEntry {
        name: "chapman_kolmogorov",
        anchor: "kernel axiom: semigroup law",
        applies_to: &[Kind::Graph, Kind::Gasket, Kind::Wave],
        summary: "max |p_{s+t} − p_t W p_s| / max |p_{s+t}|",
    },
    CatalogueEntry {
        name: "symmetry",
        anchor: "kernel axiom: adjoint symmetry",
        applies_to: &[Kind::Graph, Kind::Gasket, Kind::Wave],
        summary: "max |p − pᵀ| / max |p|; block transpose with U for the wave system",
    },
    CatalogueEntry {
        name: "time_derivative",
        anchor: "kernel axiom: time derivative",
        applies_to: STATIC,
        summary: "central difference of p_t in t against A_x p_t",
    },
    CatalogueEntry {
        name: "mass_conservation",
        anchor: "kernel axiom: conservation without Dirichlet vertices",
        applies_to: STATIC,
        summary: "max_x |Σ_y p_t(x, y) w(y) − 1|",
    },
    CatalogueEntry {
        name: "pointwise_exponent",
        anchor: "one-coordinate Hölder exponent",
        applies_to: STATIC,
        summary: "fitted exponent of x ↦ p_t(x, y₀) within a band",
    },
    CatalogueEntry {
        name: "kirchhoff",
        anchor: "vertex condition and corner at a branching vertex",
        applies_to: &[Kind::Graph],
        summary: "flux residual of x ↦ p_t(x, y₀) at a vertex and the one-sided derivative gap",
    },
    CatalogueEntry {
        name: "blow_up",
        anchor: "small-time growth of the Hölder constant",
        applies_to: STATIC,
        summary: "C(t) over a time grid, two-term fit and verdict against a prediction",
    },
    CatalogueEntry {
        name: "joint_hoelder",
        anchor: "joint Hölder continuity by factorization",
        applies_to: STATIC,
        summary: "joint seminorm on the product against M(t)·C(t/2)",
    },
    CatalogueEntry {
        name: "second_order",
        anchor: "second-order kernel A_xA_y p_t",
        applies_to: STATIC,
        summary: "joint seminorm of A_xA_y p_t and its inner-product representation",
    },
    CatalogueEntry {
        name: "gasket_resistance",
        anchor: "gasket: corner resistance 2/3",
        applies_to: &[Kind::Gasket],
        summary: "corner-to-corner effective resistance at every level up to max_level",
    },
    CatalogueEntry {
        name: "gasket_trace",
        anchor: "gasket: trace compatibility of the forms",
        applies_to: &[Kind::Gasket],
        summary: "Schur complement of level m onto level m−1 against the level m−1 Laplacian; total mass",
    },
    CatalogueEntry {
        name: "wave_modes",
        anchor: "damped wave: per-mode exponentials",
        applies_to: &[Kind::Wave],
        summary: "closed-form 2×2 exponentials against the scaling-and-squaring oracle",
    },
    CatalogueEntry {
        name: "wave_bound",
        anchor: "damped wave: Lipschitz constant growth t⁻²",
        applies_to: &[Kind::Wave],
        summary: "C(t) scan of the generator image, small-t power and excluded cross-copy pairs",
    },
    CatalogueEntry {
        name: "nonauto_reduction",
        anchor: "evolution family: autonomous reduction",
        applies_to: &[Kind::Nonauto],
        summary: "constant form on the same mesh against the spectral exponential",
    },
    CatalogueEntry {
        name: "cocycle",
        anchor: "evolution family: cocycle law",
        applies_to: &[Kind::Nonauto],
        summary: "max |U(t,s) − U(t,r)U(r,s)| / max |U(t,s)|",
    },
    CatalogueEntry {
        name: "richardson",
        anchor: "evolution family: second order in time",
        applies_to: &[Kind::Nonauto],
        summary: "error ratio under step halving on a smooth state",
    },
    CatalogueEntry {
        name: "contractivity",
        anchor: "evolution family: contraction",
        applies_to: &[Kind::Nonauto],
        summary: "max_i ‖U e_i‖_W / ‖e_i‖_W − 1",
    },
    CatalogueEntry {
        name: "nonauto_hoelder",
        anchor: "evolution family: one-coordinate and joint Hölder continuity",
        applies_to: &[Kind::Nonauto],
        summary: "form-domain one-coordinate exponent and joint exponent of p_{t,s}",
    },
];

pub fn catalogue_index(name: &str) -> Option<usize> {
    CATALOGUE.iter().position(|e| e.name == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricChoice {
    #[default]
    Native,
    Euclidean,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    #[serde(default = "five")]
    pub count: usize,
    #[serde(default = "spectrum_tol")]
    pub rel_tol: f64,
    #[serde(default)]
    pub reference: Option<Vec<f64>>,
    /// Compare with `(kπ/L)²`.
    #[serde(default)]
    pub interval_length: Option<f64>,
}
fn five() -> usize {
    5
}
fn spectrum_tol() -> f64 {
    5e-3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChapmanParams {
    pub s: f64,
    pub t: f64,
    #[serde(default = "ck_tol")]
    pub tol: f64,
}
fn ck_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryParams {
    pub t: f64,
    #[serde(default = "sym_tol")]
    pub tol: f64,
}
fn sym_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivativeParams {
    pub t: f64,
    #[serde(default = "fd_delta")]
    pub delta: f64,
    #[serde(default = "fd_tol")]
    pub tol: f64,
}
fn fd_delta() -> f64 {
    1e-4
}
fn fd_tol() -> f64 {
    1e-5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassParams {
    pub t: f64,
    #[serde(default = "ck_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointwiseParams {
    pub t: f64,
    pub point: PointRef,
    pub band: [f64; 2],
    #[serde(default = "half")]
    pub alpha: f64,
    #[serde(default)]
    pub metric: MetricChoice,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KirchhoffParams {
    pub t: f64,
    pub vertex: String,
    pub point: PointRef,
    #[serde(default = "flux_tol")]
    pub flux_tol: f64,
    #[serde(default = "gap_factor")]
    pub gap_factor: f64,
}
fn flux_tol() -> f64 {
    1e-3
}
fn gap_factor() -> f64 {
    10.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowUpParams {
    #[serde(default = "default_grid")]
    pub t_grid: Vec<f64>,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default)]
    pub norm: NormChoice,
    pub prediction: Prediction,
    #[serde(default)]
    pub metric: MetricChoice,
}
fn default_grid() -> Vec<f64> {
    log_grid(1e-2, 1.0, 9)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointParams {
    pub t: f64,
    #[serde(default = "half")]
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondOrderParams {
    pub t: f64,
    #[serde(default = "half")]
    pub alpha: f64,
    #[serde(default = "ck_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResistanceParams {
    #[serde(default = "six")]
    pub max_level: u32,
    #[serde(default = "sym_tol")]
    pub tol: f64,
}
fn six() -> u32 {
    6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceParams {
    #[serde(default = "sym_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveModesParams {
    #[serde(default = "wave_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "wave_rhos")]
    pub rhos: Vec<f64>,
    #[serde(default = "wave_times")]
    pub times: Vec<f64>,
    #[serde(default = "wave_tol")]
    pub tol: f64,
}
fn wave_lambdas() -> Vec<f64> {
    vec![0.5, 1.0, 10.0, 100.0]
}
fn wave_rhos() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 4.0]
}
fn wave_times() -> Vec<f64> {
    vec![0.01, 0.1, 1.0]
}
fn wave_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveBoundParams {
    #[serde(default = "default_grid")]
    pub t_grid: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionParams {
    #[serde(default = "one")]
    pub span: f64,
    #[serde(default = "steps_256")]
    pub steps: usize,
    #[serde(default = "reduction_tol")]
    pub tol: f64,
}
fn steps_256() -> usize {
    256
}
fn reduction_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleParams {
    pub r: f64,
    pub t: f64,
    #[serde(default = "steps_256")]
    pub steps: usize,
    #[serde(default = "cocycle_tol")]
    pub tol: f64,
}
fn cocycle_tol() -> f64 {
    1e-5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RichardsonParams {
    pub t: f64,
    #[serde(default = "steps_16")]
    pub steps: usize,
    #[serde(default = "richardson_band")]
    pub band: [f64; 2],
}
fn steps_16() -> usize {
    16
}
fn richardson_band() -> [f64; 2] {
    [3.5, 4.5]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractivityParams {
    pub t: f64,
    #[serde(default = "contract_tol")]
    pub tol: f64,
}
fn contract_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonautoHoelderParams {
    pub t: f64,
    #[serde(default = "half")]
    pub alpha: f64,
    #[serde(default = "one_band")]
    pub one_coordinate_band: [f64; 2],
    #[serde(default = "min_joint")]
    pub min_joint_exponent: f64,
}
fn one_band() -> [f64; 2] {
    [0.4, 1.0]
}
fn min_joint() -> f64 {
    0.4
}

#[derive(Debug, Clone)]
pub enum Check {
    Spectrum(SpectrumParams),
    ChapmanKolmogorov(ChapmanParams),
    Symmetry(SymmetryParams),
    TimeDerivative(DerivativeParams),
    MassConservation(MassParams),
    PointwiseExponent(PointwiseParams),
    Kirchhoff(KirchhoffParams),
    BlowUp(BlowUpParams),
    JointHoelder(JointParams),
    SecondOrder(SecondOrderParams),
    GasketResistance(ResistanceParams),
    GasketTrace(TraceParams),
    WaveModes(WaveModesParams),
    WaveBound(WaveBoundParams),
    NonautoReduction(ReductionParams),
    Cocycle(CocycleParams),
    Richardson(RichardsonParams),
    Contractivity(ContractivityParams),
    NonautoHoelder(NonautoHoelderParams),
}

fn params<T: DeserializeOwned>(v: &Value, at: &str) -> Result<T> {
    serde_path_to_error::deserialize(v.clone()).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { format!(".{path}") };
        Error::Config(format!("{at}.params{path}: {}", e.inner()))
    })
}

fn positive(v: f64, field: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{field}: {v} must be positive and finite")))
    }
}

fn band(b: [f64; 2], field: &str) -> Result<()> {
    if b[0].is_finite() && b[1].is_finite() && b[0] <= b[1] {
        Ok(())
    } else {
        Err(Error::Config(format!("{field}: [{}, {}] is not an interval", b[0], b[1])))
    }
}

impl Check {
    /// Parses and validates the parameters of check `name`; `at` locates
    /// the entry for diagnostics.
    pub fn parse(name: &str, v: &Value, kind: Kind, at: &str) -> Result<Self> {
        let entry = catalogue_index(name)
            .map(|i| &CATALOGUE[i])
            .ok_or_else(|| Error::Config(format!("{at}.name: unknown check {name:?} (see list-checks)")))?;
        if !entry.applies_to.contains(&kind) {
            return Err(Error::Config(format!("{at}.name: {name} does not apply to {kind:?} instances")));
        }
        let f = |s: &str| format!("{at}.params.{s}");
        let c = match name {
            "spectrum" => {
                let p: SpectrumParams = params(v, at)?;
                positive(p.rel_tol, &f("rel_tol"))?;
                if let Some(l) = p.interval_length {
                    positive(l, &f("interval_length"))?;
                }
                Check::Spectrum(p)
            }
            "chapman_kolmogorov" => {
                let p: ChapmanParams = params(v, at)?;
                positive(p.s, &f("s"))?;
                positive(p.t, &f("t"))?;
                Check::ChapmanKolmogorov(p)
            }
            "symmetry" => {
                let p: SymmetryParams = params(v, at)?;
                positive(p.t, &f("t"))?;
                Check::Symmetry(p)
            }
            "time_derivative" => {
                let p: DerivativeParams = params(v, at)?;
                positive(p.t, &f("t"))?;
                positive(p.delta, &f("delta"))?;
                if p.delta >= p.t {
                    return Err(Error::Config(format!("{}: must be below t", f("delta"))));
                }
                Check::TimeDerivative(p)
            }
            "mass_conservation" => {
                let p: MassParams = params(v, at)?;
                positive(p.t, &f("t"))?;
                Check::MassConservation(p)
            }
            "pointwise_exponent" => {
                let p: PointwiseParams = params(v, at)?;
                positive(p.t, &f("t"))?;
                band(p.band, &f("band"))?;
                if p.metric == MetricChoice::Euclidean && kind != Kind::Gasket {
                    return Err(Error::Config(format!("{}: euclidean needs a gasket instance", f("metric"))));
                }
                Check::PointwiseExponent(p)
            }
            "kirchhoff" => {
                let p: KirchhoffParams = params(v, at)?;
                positive(p.t, &f("t"))?;
                Check::Kirchhoff(p)
            }
            "blow_up" => {
                let p: BlowUpParams = params(v, at)?;
                ScanConfig {
                    t_grid: p.t_grid.clone(),
                    alpha: p.alpha,
                    norm: p.norm,
                    prediction: p.prediction.clone(),
                }
                .validate()
                .map_err(|e| Error::Config(format!("{at}.params: {e}")))?;
                if p.metric == MetricChoice::Euclidean && kind != Kind::Gasket {
                    return Err(Error::Config(format!("{}: euclidean needs a gasket instance", f("metric"))));
                }
                Check::BlowUp(p)
            }
            "joint_hoelder" => {
                let p: JointParams = params(v, at)?;
                positive(p.t, &f("t"))?;
                Check::JointHoelder(p)
            }
            "second_order" => {
                let p: SecondOrderParams = params(v, at)?;
                positive(p.t, &f("t"))?;
                Check::SecondOrder(p)
            }
            "gasket_resistance" => {
                let p: ResistanceParams = params(v, at)?;
                if p.max_level > crate::fractal_ops::MAX_LEVEL {
                    return Err(Error::Config(format!("{}: above {}", f("max_level"), crate::fractal_ops::MAX_LEVEL)));
                }
                Check::GasketResistance(p)
            }
            "gasket_trace" => Check::GasketTrace(params(v, at)?),
            "wave_modes" => {
                let p: WaveModesParams = params(v, at)?;
                for (i, x) in p.lambdas.iter().chain(&p.rhos).enumerate() {
                    positive(*x, &f(&format!("lambdas/rhos[{i}]")))?;
                }
                Check::WaveModes(p)
            }
            "wave_bound" => {
                let p: WaveBoundParams = params(v, at)?;
                crate::regcheck::validate_grid(&p.t_grid).map_err(|e| Error::Config(format!("{}: {e}", f("t_grid"))))?;
                Check::WaveBound(p)
            }
            "nonauto_reduction" => {
                let p: ReductionParams = params(v, at)?;
                positive(p.span, &f("span"))?;
                Check::NonautoReduction(p)
            }
            "cocycle" => Check::Cocycle(params(v, at)?),
            "richardson" => {
                let p: RichardsonParams = params(v, at)?;
                band(p.band, &f("band"))?;
                Check::Richardson(p)
            }
            "contractivity" => Check::Contractivity(params(v, at)?),
            "nonauto_hoelder" => {
                let p: NonautoHoelderParams = params(v, at)?;
                band(p.one_coordinate_band, &f("one_coordinate_band"))?;
                Check::NonautoHoelder(p)
            }
            _ => unreachable!("catalogue and parser disagree on {name}"),
        };
        Ok(c)
    }
}

/// Result of one check as it appears in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub result: Value,
    pub notes: Vec<String>,
    /// Extra CSV artifacts, file name and content.
    #[serde(skip)]
    pub csv: Vec<(String, String)>,
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

struct Outcome {
    status: Status,
    result: Value,
    notes: Vec<String>,
    csv: Vec<(String, String)>,
}

impl Outcome {
    fn new(status: Status, result: Value) -> Self {
        Self {
            status,
            result,
            notes: Vec::new(),
            csv: Vec::new(),
        }
    }
}

fn static_model<'a>(m: &'a Model) -> Result<&'a StaticModel> {
    match m {
        Model::Static(s) => Ok(s),
        _ => Err(Error::Contract("check needs a graph or gasket instance".into())),
    }
}

fn static_kernel(m: &StaticModel, t: f64, metric: MetricChoice) -> Result<KernelMatrix> {
    let space = match metric {
        MetricChoice::Native => m.space.clone(),
        MetricChoice::Euclidean => m
            .euclidean
            .clone()
            .ok_or_else(|| Error::Contract("no Euclidean metric on this instance".into()))?,
    };
    heat_kernel(&m.spec, space, t, None)
}

/// Runs one check. Numerical failures inside a check come back as an
/// inconclusive outcome; configuration errors propagate.
pub fn run_check(check: &Check, model: &Model, index: usize) -> Result<CheckOutcome> {
    let name = match check {
        Check::Spectrum(_) => "spectrum",
        Check::ChapmanKolmogorov(_) => "chapman_kolmogorov",
        Check::Symmetry(_) => "symmetry",
        Check::TimeDerivative(_) => "time_derivative",
        Check::MassConservation(_) => "mass_conservation",
        Check::PointwiseExponent(_) => "pointwise_exponent",
        Check::Kirchhoff(_) => "kirchhoff",
        Check::BlowUp(_) => "blow_up",
        Check::JointHoelder(_) => "joint_hoelder",
        Check::SecondOrder(_) => "second_order",
        Check::GasketResistance(_) => "gasket_resistance",
        Check::GasketTrace(_) => "gasket_trace",
        Check::WaveModes(_) => "wave_modes",
        Check::WaveBound(_) => "wave_bound",
        Check::NonautoReduction(_) => "nonauto_reduction",
        Check::Cocycle(_) => "cocycle",
        Check::Richardson(_) => "richardson",
        Check::Contractivity(_) => "contractivity",
        Check::NonautoHoelder(_) => "nonauto_hoelder",
    };
    let entry = &CATALOGUE[catalogue_index(name).expect("catalogued")];
    let out = match execute(check, model, index) {
        Ok(o) => o,
        Err(e @ (Error::Config(_) | Error::Ellipticity { .. })) => return Err(e),
        Err(e) => {
            let mut o = Outcome::new(Status::Inconclusive, Value::Null);
            o.notes.push(e.to_string());
            o
        }
    };
    Ok(CheckOutcome {
        name: name.to_string(),
        anchor: entry.anchor.to_string(),
        status: out.status,
        result: out.result,
        notes: out.notes,
        csv: out.csv,
    })
}

fn execute(check: &Check, model: &Model, index: usize) -> Result<Outcome> {
    match check {
        Check::Spectrum(p) => {
            let ev = model.spectrum()?;
            let count = p.count.min(ev.len());
            let ev = &ev[..count];
            let reference: Option<Vec<f64>> = match (&p.reference, p.interval_length) {
                (Some(r), _) => Some(r.iter().take(count).copied().collect()),
                (None, Some(l)) => Some((1..=count).map(|k| (k as f64 * PI / l).powi(2)).collect()),
                (None, None) => None,
            };
            match reference {
                Some(r) if r.len() == count => {
                    let rel: Vec<f64> = ev.iter().zip(&r).map(|(a, b)| (a - b).abs() / b.abs()).collect();
                    let worst = rel.iter().copied().fold(0.0, f64::max);
                    Ok(Outcome::new(
                        verdict(worst <= p.rel_tol),
                        json!({"eigenvalues": ev, "reference": r, "relative_errors": rel, "max_relative_error": worst, "rel_tol": p.rel_tol}),
                    ))
                }
                Some(r) => Err(Error::Config(format!(
                    "spectrum: {} reference values for {count} eigenvalues",
                    r.len()
                ))),
                None => {
                    let mut o = Outcome::new(Status::Pass, json!({ "eigenvalues": ev }));
                    o.notes.push("no reference given; eigenvalues recorded only".into());
                    Ok(o)
                }
            }
        }
        Check::ChapmanKolmogorov(p) => {
            let (ks, kt, kst) = (model.kernel(p.s)?, model.kernel(p.t)?, model.kernel(p.s + p.t)?);
            let r = chapman_kolmogorov_residual(&kt, &ks, &kst)?;
            Ok(Outcome::new(verdict(r <= p.tol), json!({"s": p.s, "t": p.t, "residual": r, "tol": p.tol})))
        }
        Check::Symmetry(p) => {
            let k = model.kernel(p.t)?;
            let r = match model {
                Model::Wave(_) => block_symmetry_residual(&k)?,
                _ => symmetry_residual(&k)?,
            };
            Ok(Outcome::new(verdict(r <= p.tol), json!({"t": p.t, "residual": r, "tol": p.tol})))
        }
        Check::TimeDerivative(p) => {
            let m = static_model(model)?;
            let c = time_derivative_check(&m.spec, m.space.clone(), &m.op, p.t, p.delta)?;
            Ok(Outcome::new(
                verdict(c.max_deviation <= p.tol),
                json!({"t": p.t, "delta": p.delta, "max_deviation": c.max_deviation, "max_derivative": c.max_derivative, "tol": p.tol}),
            ))
        }
        Check::MassConservation(p) => {
            let k = model.kernel(p.t)?;
            let d = k.mass_defect();
            Ok(Outcome::new(verdict(d <= p.tol), json!({"t": p.t, "mass_defect": d, "tol": p.tol})))
        }
        Check::PointwiseExponent(p) => {
            let m = static_model(model)?;
            let k = static_kernel(m, p.t, p.metric)?;
            let y = p.point.resolve(&m.space, m.graph.as_ref())?;
            let col = k.values.column(y);
            let est = estimate_exponent(k.space.as_ref(), &col, p.alpha, None)?;
            let status = match est.fitted_exponent {
                Some(e) => verdict(e >= p.band[0] && e <= p.band[1]),
                None => Status::Inconclusive,
            };
            Ok(Outcome::new(
                status,
                json!({"t": p.t, "point": k.space.ids()[y], "metric": p.metric, "band": p.band, "estimate": est}),
            ))
        }
        Check::Kirchhoff(p) => {
            let m = static_model(model)?;
            let (g, d) = m.graph.as_ref().ok_or_else(|| Error::Contract("kirchhoff needs a graph".into()))?;
            if d.op.is_magnetic() {
                return Err(Error::Contract("kirchhoff needs a real operator".into()));
            }
            let v = g
                .vertex_index(&p.vertex)
                .ok_or_else(|| Error::Config(format!("kirchhoff: unknown vertex {:?}", p.vertex)))?;
            let k = model.kernel(p.t)?;
            let y = p.point.resolve(&m.space, m.graph.as_ref())?;
            let r = kirchhoff_defect(g, d, &k.values.column(y), v)?;
            let flux = r.flux_residual.abs();
            let ok = flux <= p.flux_tol && r.max_pairwise_gap >= p.gap_factor * flux;
            Ok(Outcome::new(
                verdict(ok),
                json!({
                    "t": p.t, "vertex": p.vertex, "point": k.space.ids()[y],
                    "one_sided": r.one_sided, "derivative_sum": r.derivative_sum,
                    "flux_residual": r.flux_residual, "max_pairwise_gap": r.max_pairwise_gap,
                    "flux_tol": p.flux_tol, "gap_factor": p.gap_factor
                }),
            ))
        }
        Check::BlowUp(p) => {
            let m = static_model(model)?;
            let cfg = ScanConfig {
                t_grid: p.t_grid.clone(),
                alpha: p.alpha,
                norm: p.norm,
                prediction: p.prediction.clone(),
            };
            let report = scan_constants("scenario", |t| static_kernel(m, t, p.metric), &cfg, Some(&m.op))?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            let mut o = Outcome::new(report.verdict.status, serde_json::to_value(&report)?);
            o.csv.push((format!("scan_{index}_blow_up.csv"), String::from_utf8(csv).expect("ascii")));
            Ok(o)
        }
        Check::JointHoelder(p) => {
            static_model(model)?;
            let (k, kh) = (model.kernel(p.t)?, model.kernel(p.t / 2.0)?);
            let j = joint_scan(&k, &kh, p.alpha)?;
            let finite = j.estimate.seminorm_at_alpha.is_finite();
            Ok(Outcome::new(verdict(finite && j.bound_holds), json!({"t": p.t, "joint": j})))
        }
        Check::SecondOrder(p) => {
            let m = static_model(model)?;
            let (k, kh) = (model.kernel(p.t)?, model.kernel(p.t / 2.0)?);
            let s = second_order_scan(&k, &kh, &m.op, p.alpha)?;
            let ok = s.estimate.seminorm_at_alpha.is_finite() && s.cross_check <= p.tol;
            Ok(Outcome::new(verdict(ok), json!({"t": p.t, "tol": p.tol, "second_order": s})))
        }
        Check::GasketResistance(p) => {
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for level in 0..=p.max_level {
                let g = GasketApproximation::new(level)?;
                let r = [
                    effective_resistance(&g, 0, 1)?,
                    effective_resistance(&g, 1, 2)?,
                    effective_resistance(&g, 0, 2)?,
                ];
                worst = r.iter().fold(worst, |w, r| w.max((r - 2.0 / 3.0).abs()));
                rows.push(json!({"level": level, "corner_resistances": r}));
            }
            Ok(Outcome::new(verdict(worst <= p.tol), json!({"levels": rows, "max_deviation": worst, "tol": p.tol})))
        }
        Check::GasketTrace(p) => {
            let m = static_model(model)?;
            let b = m.gasket.as_ref().ok_or_else(|| Error::Contract("gasket_trace needs a gasket".into()))?;
            let total: f64 = b.op.mass_weights().iter().sum();
            let mass_ok = (total - 1.0).abs() <= p.tol;
            let trace = if b.gasket.level() == 0 {
                None
            } else {
                let schur = trace_to_coarser(&b.gasket)?;
                let coarse = GasketApproximation::new(b.gasket.level() - 1)?.laplacian();
                Some(schur.max_abs_diff(&coarse) / coarse.max_abs())
            };
            let ok = mass_ok && trace.map_or(true, |r| r <= p.tol);
            Ok(Outcome::new(
                verdict(ok),
                json!({"level": b.gasket.level(), "trace_residual": trace, "total_mass": total, "tol": p.tol}),
            ))
        }
        Check::WaveModes(p) => {
            let mut worst = 0.0f64;
            for &l in &p.lambdas {
                for &r in &p.rhos {
                    let mm = mode_matrix(l, r);
                    let dense = DenseMatrix::from_fn(2, 2, |i, j| mm[i][j]);
                    for &t in &p.times {
                        let e = mode_exponential(&mm, t);
                        let o = expm_oracle(&dense, t)?;
                        for i in 0..2 {
                            for j in 0..2 {
                                worst = worst.max((e[i][j] - o[(i, j)]).abs());
                            }
                        }
                    }
                }
            }
            Ok(Outcome::new(
                verdict(worst <= p.tol),
                json!({"lambdas": p.lambdas, "rhos": p.rhos, "times": p.times, "max_deviation": worst, "tol": p.tol}),
            ))
        }
        Check::WaveBound(p) => {
            let Model::Wave(sys) = model else {
                return Err(Error::Contract("wave_bound needs a wave instance".into()));
            };
            let (report, fit) = wave_bound_scan(sys, &p.t_grid)?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            let mut o = Outcome::new(report.verdict.status, json!({"scan": report, "fit": fit}));
            o.csv.push((format!("scan_{index}_wave_bound.csv"), String::from_utf8(csv).expect("ascii")));
            Ok(o)
        }
        Check::NonautoReduction(p) => {
            let Model::Nonauto(m) = model else {
                return Err(Error::Contract("nonauto_reduction needs a nonauto instance".into()));
            };
            let fam = FormFamily::constant(m.graph.clone(), m.h)?;
            let u = propagate(&fam, 0.0, p.span, p.steps)?;
            let e = autonomous_reference(&fam.operator_at(0.0)?, p.span)?;
            let d = u.matrix.max_abs_diff(&e);
            Ok(Outcome::new(
                verdict(d <= p.tol),
                json!({"span": p.span, "steps": p.steps, "max_deviation": d, "tol": p.tol}),
            ))
        }
        Check::Cocycle(p) => {
            let Model::Nonauto(m) = model else {
                return Err(Error::Contract("cocycle needs a nonauto instance".into()));
            };
            let r = cocycle_residual(&m.fam, m.s, p.r, p.t, p.steps)?;
            Ok(Outcome::new(
                verdict(r <= p.tol),
                json!({"s": m.s, "r": p.r, "t": p.t, "steps": p.steps, "residual": r, "tol": p.tol}),
            ))
        }
        Check::Richardson(p) => {
            let Model::Nonauto(m) = model else {
                return Err(Error::Contract("richardson needs a nonauto instance".into()));
            };
            let g = ground_state(&m.fam, m.s)?;
            let r = richardson_ratio(&m.fam, m.s, p.t, p.steps, &g)?;
            Ok(Outcome::new(
                verdict(r >= p.band[0] && r <= p.band[1]),
                json!({"s": m.s, "t": p.t, "steps": p.steps, "ratio": r, "band": p.band}),
            ))
        }
        Check::Contractivity(p) => {
            let Model::Nonauto(m) = model else {
                return Err(Error::Contract("contractivity needs a nonauto instance".into()));
            };
            let u = propagate(&m.fam, m.s, p.t, m.steps)?;
            let d = contractivity_defect(&m.fam, &u);
            Ok(Outcome::new(verdict(d <= p.tol), json!({"s": m.s, "t": p.t, "defect": d, "tol": p.tol})))
        }
        Check::NonautoHoelder(p) => {
            let Model::Nonauto(m) = model else {
                return Err(Error::Contract("nonauto_hoelder needs a nonauto instance".into()));
            };
            let scan = nonauto_kernel_scan(&m.fam, m.s, p.t, p.alpha, m.steps)?;
            let b = p.one_coordinate_band;
            let one_ok = scan.one_coordinate.fitted_exponent.map(|e| e >= b[0] && e <= b[1]);
            let joint_ok = scan
                .joint
                .fitted_exponent
                .map(|e| e >= p.min_joint_exponent && scan.joint.seminorm_at_alpha.is_finite());
            let status = match (one_ok, joint_ok) {
                (Some(a), Some(b)) => verdict(a && b),
                _ => Status::Inconclusive,
            };
            Ok(Outcome::new(
                status,
                json!({"scan": scan, "one_coordinate_band": b, "min_joint_exponent": p.min_joint_exponent}),
            ))
        }
    }
}
