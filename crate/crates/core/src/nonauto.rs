//! Evolution families for time-dependent forms on a metric graph.
//!
//! The form at time `τ` is `a(τ; u) = Σ_e ∫ c_e(τ)|u′|² + V_e(τ)|u|²`, which
//! discretizes to a stiffness `K(τ)` on a fixed mesh with fixed lumped masses
//! `W`. The propagator `U(t, s)` solves `W u′ = −K(τ) u` by Crank–Nicolson
//! with `K` assembled at step midpoints, and the kernel is
//! `p_{t,s} = U(t, s) W⁻¹`.
//!
//! The interpolation-space hypotheses on the time regularity of the form have
//! no finite-dimensional counterpart. Only uniform ellipticity per step and an
//! empirical modulus of continuity of the sampled coefficients are checked.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_ops::{assemble, build_mesh, mesh_space, EdgeCoefficients, GraphMesh, MetricGraph};
use crate::kernel::{KernelMatrix, SpectralData};
use crate::linalg::{DenseMatrix, LuFactor};
use crate::operator::OperatorDiscretization;
use crate::regcheck::joint_estimate;
use crate::space::{estimate_exponent_with, HoelderEstimate, SampledSpace};

/// A scalar function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TimeProfile {
    Constant { value: f64 },
    /// `base + amplitude·sin(frequency·τ)`.
    Sin { base: f64, amplitude: f64, frequency: f64 },
    /// Linear interpolation between samples, constant beyond the ends.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl TimeProfile {
    pub fn validate(&self) -> Result<()> {
        if let TimeProfile::Tabulated { times, values } = self {
            if times.is_empty() || times.len() != values.len() {
                return Err(Error::Config("tabulated profile needs matching, nonempty times and values".into()));
            }
            if times.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config("tabulated times must be strictly ascending".into()));
            }
        }
        Ok(())
    }

    pub fn at(&self, tau: f64) -> f64 {
        match self {
            TimeProfile::Constant { value } => *value,
            TimeProfile::Sin {
                base,
                amplitude,
                frequency,
            } => base + amplitude * (frequency * tau).sin(),
            TimeProfile::Tabulated { times, values } => {
                if tau <= times[0] {
                    return values[0];
                }
                let last = times.len() - 1;
                if tau >= times[last] {
                    return values[last];
                }
                let k = times.partition_point(|&x| x <= tau) - 1;
                let r = (tau - times[k]) / (times[k + 1] - times[k]);
                values[k] * (1.0 - r) + values[k + 1] * r
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TimeProfile::Constant { .. })
    }
}

/// Diffusion coefficient and potential per edge (one entry means shared by
/// all edges), on a fixed mesh.
#[derive(Debug, Clone)]
pub struct FormFamily {
    pub graph: MetricGraph,
    pub mesh: GraphMesh,
    pub coefficient: Vec<TimeProfile>,
    pub potential: Vec<TimeProfile>,
    /// Required lower bound on every coefficient.
    pub eta: f64,
    mass: Vec<f64>,
    space: Arc<SampledSpace>,
}

impl FormFamily {
    pub fn new(
        graph: MetricGraph,
        h: f64,
        coefficient: Vec<TimeProfile>,
        potential: Vec<TimeProfile>,
        eta: f64,
    ) -> Result<Self> {
        let edges = graph.edges().len();
        for (name, list) in [("coefficient", &coefficient), ("potential", &potential)] {
            if list.len() != 1 && list.len() != edges {
                return Err(Error::Config(format!(
                    "{name} profiles: give one shared profile or one per edge ({edges})"
                )));
            }
            for p in list.iter() {
                p.validate()?;
            }
        }
        if !(eta > 0.0) {
            return Err(Error::Config(format!("ellipticity bound {eta} must be positive")));
        }
        let mesh = build_mesh(&graph, h)?;
        let zero = |_: usize, _: f64| 0.0;
        let one = |_: usize, _: f64| 1.0;
        let (_, _, mass) = assemble(
            &graph,
            &mesh,
            &EdgeCoefficients {
                coefficient: &one,
                potential: &zero,
            },
        )?;
        let space = Arc::new(mesh_space(&graph, &mesh, mass.clone())?);
        Ok(Self {
            graph,
            mesh,
            coefficient,
            potential,
            eta,
            mass,
            space,
        })
    }

    /// `c ≡ 1`, `V ≡ 0`.
    pub fn constant(graph: MetricGraph, h: f64) -> Result<Self> {
        Self::new(
            graph,
            h,
            vec![TimeProfile::Constant { value: 1.0 }],
            vec![TimeProfile::Constant { value: 0.0 }],
            0.5,
        )
    }

    /// `c(τ) = 1 + amplitude·sin(frequency·τ)` on every edge, `V ≡ 0`.
    pub fn sin_modulated(graph: MetricGraph, h: f64, amplitude: f64, frequency: f64) -> Result<Self> {
        let eta = (1.0 - amplitude.abs()) * 0.5;
        Self::new(
            graph,
            h,
            vec![TimeProfile::Sin {
                base: 1.0,
                amplitude,
                frequency,
            }],
            vec![TimeProfile::Constant { value: 0.0 }],
            eta.max(f64::MIN_POSITIVE),
        )
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn mass_weights(&self) -> &[f64] {
        &self.mass
    }

    pub fn space(&self) -> Arc<SampledSpace> {
        self.space.clone()
    }

    pub fn is_autonomous(&self) -> bool {
        self.coefficient.iter().chain(&self.potential).all(TimeProfile::is_constant)
    }

    fn profile(list: &[TimeProfile], edge: usize) -> &TimeProfile {
        if list.len() == 1 {
            &list[0]
        } else {
            &list[edge]
        }
    }

    /// Smallest coefficient over the edges at time `tau`.
    pub fn min_coefficient(&self, tau: f64) -> f64 {
        (0..self.graph.edges().len())
            .map(|e| Self::profile(&self.coefficient, e).at(tau))
            .fold(f64::INFINITY, f64::min)
    }

    /// Stiffness of the form frozen at `tau`.
    pub fn stiffness_at(&self, tau: f64) -> Result<DenseMatrix> {
        let c = self.min_coefficient(tau);
        if !(c >= self.eta) {
            return Err(Error::Ellipticity {
                time: tau,
                coefficient: c,
                eta: self.eta,
            });
        }
        let coefficient = |e: usize, _: f64| Self::profile(&self.coefficient, e).at(tau);
        let potential = |e: usize, _: f64| Self::profile(&self.potential, e).at(tau);
        let (k, _, _) = assemble(
            &self.graph,
            &self.mesh,
            &EdgeCoefficients {
                coefficient: &coefficient,
                potential: &potential,
            },
        )?;
        Ok(k)
    }

    /// Operator frozen at `tau`.
    pub fn operator_at(&self, tau: f64) -> Result<OperatorDiscretization> {
        OperatorDiscretization::new(self.stiffness_at(tau)?, self.mass.clone(), 1, 0.5)
    }

    /// `max |c_e(τ + δ) − c_e(τ)|` over edges and `τ` sampled on `[s, t]`.
    pub fn empirical_modulus(&self, s: f64, t: f64, delta: f64, samples: usize) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..=samples {
            let tau = s + (t - s) * k as f64 / samples.max(1) as f64;
            for e in 0..self.graph.edges().len() {
                let p = Self::profile(&self.coefficient, e);
                worst = worst.max((p.at(tau + delta) - p.at(tau)).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone)]
pub struct Propagator {
    pub s: f64,
    pub t: f64,
    pub steps: usize,
    pub matrix: DenseMatrix,
    /// `true` for `s = t`, where the identity stands in for the propagator.
    pub identity: bool,
}

/// Crank–Nicolson propagator `U(t, s)` with `steps` uniform steps.
pub fn propagate(fam: &FormFamily, s: f64, t: f64, steps: usize) -> Result<Propagator> {
    if !(s.is_finite() && t.is_finite()) || t < s {
        return Err(Error::Domain(format!("propagation needs s ≤ t, got s = {s}, t = {t}")));
    }
    let n = fam.dim();
    if t == s {
        return Ok(Propagator {
            s,
            t,
            steps: 0,
            matrix: DenseMatrix::identity(n),
            identity: true,
        });
    }
    if steps == 0 {
        return Err(Error::Domain("at least one step is required".into()));
    }
    let dt = (t - s) / steps as f64;
    let w = DenseMatrix::from_diag(&fam.mass);
    let mut u = DenseMatrix::identity(n);
    let mut cached: Option<(DenseMatrix, LuFactor)> = None;
    for k in 0..steps {
        let tau = s + (k as f64 + 0.5) * dt;
        if cached.is_none() || !fam.is_autonomous() {
            let kmid = fam.stiffness_at(tau)?.scale(0.5 * dt);
            let lhs = w.add(&kmid)?;
            let rhs = w.sub(&kmid)?;
            cached = Some((rhs, LuFactor::new(&lhs)?));
        }
        let (rhs, lu) = cached.as_ref().expect("set above");
        u = lu.solve_matrix(&rhs.matmul(&u)?)?;
    }
    Ok(Propagator {
        s,
        t,
        steps,
        matrix: u,
        identity: false,
    })
}

/// Steps for a sub-interval at the density of `steps` over `[s, t]`.
pub fn matched_steps(steps: usize, s: f64, t: f64, a: f64, b: f64) -> usize {
    ((steps as f64) * (b - a) / (t - s)).ceil() as usize
}

/// `max |U(t,s) − U(t,r)U(r,s)| / max |U(t,s)|` at matched step density.
pub fn cocycle_residual(fam: &FormFamily, s: f64, r: f64, t: f64, steps: usize) -> Result<f64> {
    if !(s <= r && r <= t && s < t) {
        return Err(Error::Domain(format!("need s ≤ r ≤ t with s < t, got ({s}, {r}, {t})")));
    }
    let full = propagate(fam, s, t, steps)?;
    let late = propagate(fam, r, t, matched_steps(steps, s, t, r, t))?;
    let early = propagate(fam, s, r, matched_steps(steps, s, t, s, r))?;
    let product = late.matrix.matmul(&early.matrix)?;
    Ok(full.matrix.max_abs_diff(&product) / full.matrix.max_abs())
}

/// `e^{(t−s)A}` from the spectral data of the frozen operator, acting on
/// nodal values: `Φ e^{−Λ(t−s)} Φᵀ W`.
pub fn autonomous_reference(op: &OperatorDiscretization, span: f64) -> Result<DenseMatrix> {
    let spec = SpectralData::from_operator(op)?;
    let n = spec.dim();
    let phi = spec.modes();
    let scaled = DenseMatrix::from_fn(spec.len(), n, |k, j| {
        (-spec.eigenvalues()[k] * span).exp() * phi[(j, k)] * spec.weights()[j]
    });
    Ok(phi.matmul(&scaled)?)
}

/// `max |U_n f − U_{2n} f| / max |U_{2n} f − U_{4n} f|`; about 4 for a
/// second-order scheme once `f` is smooth enough that stiff modes are negligible.
pub fn richardson_ratio(fam: &FormFamily, s: f64, t: f64, steps: usize, f: &[f64]) -> Result<f64> {
    if f.len() != fam.dim() {
        return Err(Error::Dimension(format!("initial state has {} values, mesh has {}", f.len(), fam.dim())));
    }
    let run = |n: usize| -> Result<Vec<f64>> { Ok(propagate(fam, s, t, n)?.matrix.mul_vec(f)?) };
    let (a, b, c) = (run(steps)?, run(2 * steps)?, run(4 * steps)?);
    let gap = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    Ok(gap(&a, &b) / gap(&b, &c))
}

/// Lowest mode of the operator frozen at `tau`, normalized in `L²(W)`.
pub fn ground_state(fam: &FormFamily, tau: f64) -> Result<Vec<f64>> {
    let spec = SpectralData::from_operator(&fam.operator_at(tau)?)?;
    Ok(spec.mode(0))
}

/// `max_i ‖U e_i‖_W / ‖e_i‖_W − 1`; nonpositive for a contraction on the basis.
pub fn contractivity_defect(fam: &FormFamily, prop: &Propagator) -> f64 {
    let w = fam.mass_weights();
    let n = fam.dim();
    (0..n)
        .map(|i| {
            let col: f64 = (0..n).map(|r| w[r] * prop.matrix[(r, i)].powi(2)).sum();
            (col / w[i]).sqrt() - 1.0
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Kernel `p_{t,s} = U(t,s) W⁻¹`.
pub fn nonauto_kernel(fam: &FormFamily, s: f64, t: f64, steps: usize) -> Result<KernelMatrix> {
    let prop = propagate(fam, s, t, steps)?;
    if prop.identity {
        return Ok(KernelMatrix::identity_surrogate(fam.space()));
    }
    let inv: Vec<f64> = fam.mass.iter().map(|w| 1.0 / w).collect();
    KernelMatrix::new(t - s, prop.matrix.scale_cols(&inv), fam.space(), 1, false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonautoScan {
    pub s: f64,
    pub t: f64,
    pub steps: usize,
    /// `x ↦ p_{t,s}(x, ·)` measured in the form-domain norm.
    pub one_coordinate: HoelderEstimate,
    /// `(x, y) ↦ p_{t,s}(x, y)` on the product sum metric.
    pub joint: HoelderEstimate,
    pub joint_base_points: usize,
    pub modulus_at_dt: f64,
}

/// One-coordinate (form-domain norm `‖f‖² + a(t; f)`) and joint Hölder
/// estimates of the kernel.
pub fn nonauto_kernel_scan(fam: &FormFamily, s: f64, t: f64, alpha: f64, steps: usize) -> Result<NonautoScan> {
    if !(s < t) {
        return Err(Error::Domain(format!("kernel scan needs s < t, got s = {s}, t = {t}")));
    }
    let k = nonauto_kernel(fam, s, t, steps)?;
    let stiff = fam.stiffness_at(t)?;
    let w = fam.mass_weights().to_vec();
    let n = fam.dim();
    let mut diff = vec![0.0; n];
    let one_coordinate = estimate_exponent_with(k.space.as_ref(), alpha, None, |i, j| {
        for ((d, a), b) in diff.iter_mut().zip(k.row(i)).zip(k.row(j)) {
            *d = a - b;
        }
        let l2: f64 = w.iter().zip(&diff).map(|(w, d)| w * d * d).sum();
        let kd = stiff.mul_vec(&diff).expect("sizes agree");
        let energy: f64 = kd.iter().zip(&diff).map(|(a, b)| a * b).sum();
        (l2 + energy.max(0.0)).sqrt()
    })?;
    let (joint, used, _) = joint_estimate(&k.values, k.space.as_ref(), alpha, crate::regcheck::JOINT_BASE_CAP)?;
    Ok(NonautoScan {
        s,
        t,
        steps,
        one_coordinate,
        joint,
        joint_base_points: used,
        modulus_at_dt: fam.empirical_modulus(s, t, (t - s) / steps as f64, 64),
    })
}
