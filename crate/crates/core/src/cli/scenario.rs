//! Scenario documents and the models they describe.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::damped_wave::BlockModeSystem;
use crate::error::{Error, Result};
use crate::fractal_ops::{build_gasket, GasketBuild, MAX_LEVEL};
use crate::graph_ops::{discretize_graph, GraphDiscretization, MetricGraph};
use crate::kernel::{heat_kernel, KernelMatrix, SpectralData};
use crate::nonauto::{nonauto_kernel, FormFamily, TimeProfile};
use crate::operator::OperatorDiscretization;
use crate::space::{disjoint_union, SampledSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub instance: Instance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<Mesh>,
    /// Times at which kernels are written out.
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mesh {
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Instance {
    /// Graph document, relative to the scenario file.
    Graph { file: PathBuf },
    Gasket { level: u32 },
    /// Damped wave on the Dirichlet interval with `n` interior points.
    Wave { rho: f64, n: usize },
    /// Time-dependent form on `graph` (default: 3-star, unit arms,
    /// Dirichlet leaves), started at `s`.
    Nonauto {
        preset: Preset,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        graph: Option<PathBuf>,
        #[serde(default)]
        s: f64,
        #[serde(default = "default_steps")]
        steps: usize,
    },
}

fn default_steps() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    Constant,
    SinModulated { amplitude: f64, frequency: f64 },
    /// Shared coefficient sampled in time, interpolated linearly.
    Tabulated {
        times: Vec<f64>,
        values: Vec<f64>,
        eta: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub name: String,
    #[serde(default = "empty_object")]
    pub params: Value,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Graph,
    Gasket,
    Wave,
    Nonauto,
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self {
            Instance::Graph { .. } => Kind::Graph,
            Instance::Gasket { .. } => Kind::Gasket,
            Instance::Wave { .. } => Kind::Wave,
            Instance::Nonauto { .. } => Kind::Nonauto,
        }
    }
}

/// Parses a scenario, reporting the failing field path with line and column.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Config(format!("{}: {}", e.path(), e.inner())))
}

/// Structural checks that need no numerics.
pub fn validate_scenario(sc: &Scenario, base: &Path) -> Result<()> {
    if sc.name.is_empty() || sc.name.contains(['/', '\\']) {
        return Err(Error::Config("name: must be nonempty and free of path separators".into()));
    }
    let need_mesh = |what: &str| -> Result<f64> {
        let h = sc
            .mesh
            .ok_or_else(|| Error::Config(format!("mesh: required for {what} instances")))?
            .h;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("mesh.h: {h} must be positive")));
        }
        Ok(h)
    };
    let need_file = |f: &Path, field: &str| -> Result<()> {
        if !base.join(f).is_file() {
            return Err(Error::Config(format!("{field}: file {} not found", f.display())));
        }
        Ok(())
    };
    match &sc.instance {
        Instance::Graph { file } => {
            need_mesh("graph")?;
            need_file(file, "instance.file")?;
        }
        Instance::Gasket { level } => {
            if *level > MAX_LEVEL {
                return Err(Error::Config(format!("instance.level: {level} exceeds {MAX_LEVEL}")));
            }
        }
        Instance::Wave { rho, n } => {
            if !(*rho > 0.0 && rho.is_finite()) {
                return Err(Error::Config(format!("instance.rho: {rho} must be positive")));
            }
            if *n < 2 {
                return Err(Error::Config("instance.n: need at least two interior points".into()));
            }
        }
        Instance::Nonauto { preset, graph, s, steps } => {
            need_mesh("nonauto")?;
            if let Some(f) = graph {
                need_file(f, "instance.graph")?;
            }
            if !s.is_finite() {
                return Err(Error::Config("instance.s: must be finite".into()));
            }
            if *steps == 0 {
                return Err(Error::Config("instance.steps: must be positive".into()));
            }
            if let Preset::Tabulated { times, values, eta } = preset {
                TimeProfile::Tabulated {
                    times: times.clone(),
                    values: values.clone(),
                }
                .validate()
                .map_err(|e| Error::Config(format!("instance.preset: {e}")))?;
                if !(*eta > 0.0) {
                    return Err(Error::Config("instance.preset.eta: must be positive".into()));
                }
            }
            if let Some(t) = sc.times.iter().find(|t| **t <= *s) {
                return Err(Error::Config(format!("times: {t} is not after s = {s}")));
            }
        }
    }
    if let Some((i, t)) = sc.times.iter().enumerate().find(|(_, t)| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::Config(format!("times[{i}]: {t} must be positive and finite")));
    }
    Ok(())
}

/// Graph, gasket or wave instance with a self-adjoint spectral kernel.
#[derive(Debug, Clone)]
pub struct StaticModel {
    /// Real generator; the real embedding for magnetic graphs.
    pub op: OperatorDiscretization,
    pub spec: SpectralData,
    pub space: Arc<SampledSpace>,
    /// Euclidean metric on the gasket vertices.
    pub euclidean: Option<Arc<SampledSpace>>,
    pub graph: Option<(MetricGraph, GraphDiscretization)>,
    pub gasket: Option<GasketBuild>,
}

#[derive(Debug, Clone)]
pub struct NonautoModel {
    pub fam: FormFamily,
    pub graph: MetricGraph,
    pub h: f64,
    pub s: f64,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub enum Model {
    Static(Box<StaticModel>),
    Wave(Box<BlockModeSystem>),
    Nonauto(Box<NonautoModel>),
}

/// Three unit arms from `c` with Dirichlet leaves.
pub fn default_star() -> Result<MetricGraph> {
    let mut g = MetricGraph::star(3, 1.0)?;
    for v in 1..4 {
        g.set_dirichlet(v)?;
    }
    Ok(g)
}

pub fn build_model(sc: &Scenario, base: &Path) -> Result<Model> {
    let h = sc.mesh.map(|m| m.h);
    match &sc.instance {
        Instance::Graph { file } => {
            let g = MetricGraph::from_file(&base.join(file))?;
            let d = discretize_graph(&g, h.expect("validated"))?;
            let (op, space) = if d.op.is_magnetic() {
                (d.op.real_embedding()?, disjoint_union(&d.space, &d.space))
            } else {
                (d.op.clone(), d.space.clone())
            };
            let spec = SpectralData::from_operator(&op)?;
            Ok(Model::Static(Box::new(StaticModel {
                op,
                spec,
                space: Arc::new(space),
                euclidean: None,
                graph: Some((g, d)),
                gasket: None,
            })))
        }
        Instance::Gasket { level } => {
            let b = build_gasket(*level)?;
            let spec = SpectralData::from_operator(&b.op)?;
            Ok(Model::Static(Box::new(StaticModel {
                op: b.op.clone(),
                spec,
                space: Arc::new(b.resistance_space.clone()),
                euclidean: Some(Arc::new(b.euclidean_space.clone())),
                graph: None,
                gasket: Some(b),
            })))
        }
        Instance::Wave { rho, n } => Ok(Model::Wave(Box::new(BlockModeSystem::interval(*n, *rho)?))),
        Instance::Nonauto { preset, graph, s, steps } => {
            let g = match graph {
                Some(f) => MetricGraph::from_file(&base.join(f))?,
                None => default_star()?,
            };
            let h = h.expect("validated");
            let fam = match preset {
                Preset::Constant => FormFamily::constant(g.clone(), h)?,
                Preset::SinModulated { amplitude, frequency } => {
                    FormFamily::sin_modulated(g.clone(), h, *amplitude, *frequency)?
                }
                Preset::Tabulated { times, values, eta } => FormFamily::new(
                    g.clone(),
                    h,
                    vec![TimeProfile::Tabulated {
                        times: times.clone(),
                        values: values.clone(),
                    }],
                    vec![TimeProfile::Constant { value: 0.0 }],
                    *eta,
                )?,
            };
            Ok(Model::Nonauto(Box::new(NonautoModel {
                fam,
                graph: g,
                h,
                s: *s,
                steps: *steps,
            })))
        }
    }
}

impl Model {
    /// Eigenvalues written to `spectrum.csv`: the generator's, the wave
    /// system's base Laplacian, or the form frozen at the start time.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        match self {
            Model::Static(m) => Ok(m.spec.eigenvalues().to_vec()),
            Model::Wave(w) => Ok(w.base_spec.eigenvalues().to_vec()),
            Model::Nonauto(m) => {
                let op = m.fam.operator_at(m.s)?;
                Ok(SpectralData::from_operator(&op)?.eigenvalues().to_vec())
            }
        }
    }

    pub fn kernel(&self, t: f64) -> Result<KernelMatrix> {
        match self {
            Model::Static(m) => heat_kernel(&m.spec, m.space.clone(), t, None),
            Model::Wave(w) => crate::damped_wave::wave_kernel(w, t),
            Model::Nonauto(m) => nonauto_kernel(&m.fam, m.s, t, m.steps),
        }
    }

    pub fn space(&self) -> Arc<SampledSpace> {
        match self {
            Model::Static(m) => m.space.clone(),
            Model::Wave(w) => w.union_space.clone(),
            Model::Nonauto(m) => m.fam.space(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.space().len()
    }
}

/// A point of the instance, by unknown index, vertex id, or edge position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum PointRef {
    Index { index: usize },
    Vertex { vertex: String },
    OnEdge { edge: usize, position: f64 },
}

impl PointRef {
    pub fn resolve(&self, space: &SampledSpace, graph: Option<&(MetricGraph, GraphDiscretization)>) -> Result<usize> {
        let i = match self {
            PointRef::Index { index } => Some(*index).filter(|i| *i < space.len()),
            PointRef::Vertex { vertex } => space.ids().iter().position(|id| id == vertex),
            PointRef::OnEdge { edge, position } => {
                let (g, d) = graph.ok_or_else(|| Error::Config("edge positions need a graph instance".into()))?;
                if *edge >= g.edges().len() || !(*position >= 0.0 && *position <= g.edges()[*edge].length) {
                    None
                } else {
                    d.mesh.nearest_unknown(*edge, *position)
                }
            }
        };
        i.ok_or_else(|| Error::Config(format!("point {self:?} does not name an unknown")))
    }
}
