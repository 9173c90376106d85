use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use chrec_core::mesh::{
    build_uniform_mesh_on, load_mesh, uniform_refine, unstructured_unit_square, Mesh, Point,
};
use chrec_core::problems::Example;
use chrec_core::schemes::SchemeConfig;
use serde::{Deserialize, Serialize};

/// Where the mesh comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MeshSpec {
    /// `uniform:m`, regular pattern with `m` cells per side on the run domain.
    Uniform(usize),
    /// `unstructured[:k]`, the bundled unit-square mesh refined `k` times.
    Unstructured(usize),
    /// Triangle `.node`/`.ele` pair, given by base path or either file.
    File(PathBuf),
}

impl FromStr for MeshSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(m) = s.strip_prefix("uniform:") {
            let m: usize = m.parse().map_err(|_| format!("bad cell count in '{s}'"))?;
            if m == 0 {
                return Err("uniform mesh needs at least one cell per side".into());
            }
            return Ok(MeshSpec::Uniform(m));
        }
        if s == "unstructured" {
            return Ok(MeshSpec::Unstructured(0));
        }
        if let Some(k) = s.strip_prefix("unstructured:") {
            return k
                .parse()
                .map(MeshSpec::Unstructured)
                .map_err(|_| format!("bad refinement count in '{s}'"));
        }
        if s.is_empty() {
            return Err("empty mesh specification".into());
        }
        Ok(MeshSpec::File(PathBuf::from(s)))
    }
}

impl fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshSpec::Uniform(m) => write!(f, "uniform:{m}"),
            MeshSpec::Unstructured(0) => write!(f, "unstructured"),
            MeshSpec::Unstructured(k) => write!(f, "unstructured:{k}"),
            MeshSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl TryFrom<String> for MeshSpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<MeshSpec> for String {
    fn from(m: MeshSpec) -> Self {
        m.to_string()
    }
}

impl MeshSpec {
    /// `domain` only applies to uniform meshes.
    pub fn build(&self, domain: [Point; 2]) -> Result<Mesh> {
        match self {
            MeshSpec::Uniform(m) => Ok(build_uniform_mesh_on(*m, domain[0], domain[1])?),
            MeshSpec::Unstructured(k) => {
                Ok((0..*k).fold(unstructured_unit_square(), |m, _| uniform_refine(&m)))
            }
            MeshSpec::File(p) => {
                let base = match p.extension().and_then(|e| e.to_str()) {
                    Some("node" | "ele") => p.with_extension(""),
                    _ => p.clone(),
                };
                Ok(load_mesh(
                    &base.with_extension("node"),
                    &base.with_extension("ele"),
                )?)
            }
        }
    }
}

/// A complete simulation run. Written back out, resolved, as part of the
/// run manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Source of the initial data unless `initial_file` is set.
    pub example: Option<Example>,
    /// Nodal initial values, one per line in vertex order.
    pub initial_file: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    pub mesh: MeshSpec,
    /// Lower and upper corner of the domain of a uniform mesh; defaults to
    /// the example domain in a configuration file.
    pub domain: [Point; 2],
    #[serde(default)]
    pub snapshots: Vec<f64>,
    pub scheme: SchemeConfig,
}

impl RunConfig {
    /// The example's default setup.
    pub fn for_example(example: Example) -> Self {
        let d = example.defaults();
        Self {
            example: Some(example),
            initial_file: None,
            seed: 0,
            mesh: MeshSpec::Uniform(d.subdivisions),
            domain: [d.lower, d.upper],
            snapshots: d.snapshots,
            scheme: SchemeConfig::new(
                chrec_core::schemes::Variant::UniformSimple,
                d.epsilon,
                d.dt,
                d.t_end,
            ),
        }
    }

    /// Reads a run configuration or a manifest of an earlier run.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut table: toml::Table =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if !table.contains_key("run") && !table.contains_key("domain") {
            // the example's domain, or the unit square
            let example = table
                .get("example")
                .and_then(toml::Value::as_integer)
                .and_then(|n| u8::try_from(n).ok())
                .and_then(|n| Example::try_from(n).ok());
            let d = example.map_or(([0.0, 0.0], [1.0, 1.0]), |e| {
                let d = e.defaults();
                (d.lower, d.upper)
            });
            table.insert("domain".into(), toml::Value::try_from([d.0, d.1])?);
        }
        let cfg = if table.contains_key("run") {
            table.try_into::<Manifest>().map(|m| m.run)
        } else {
            table.try_into::<RunConfig>()
        };
        cfg.with_context(|| format!("invalid configuration in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.example, &self.initial_file) {
            (None, None) => bail!("example: one of `example` or `initial_file` is required"),
            (Some(e), None) if matches!(e, Example::Manufactured | Example::CosineMode) => {
                bail!("example: {e} is an accuracy test, use `converge`")
            }
            _ => {}
        }
        let [lo, hi] = self.domain;
        ensure!(
            lo[0] < hi[0] && lo[1] < hi[1],
            "domain: lower corner must be below and left of upper corner"
        );
        for &t in &self.snapshots {
            ensure!(
                t >= 0.0 && t.is_finite(),
                "snapshots: time {t} is not a non-negative number"
            );
        }
        self.scheme.validate()?;
        Ok(())
    }

    pub fn initial_condition(&self, mesh: &Mesh) -> Result<Vec<f64>> {
        if let Some(path) = &self.initial_file {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let u = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .enumerate()
                .map(|(k, l)| {
                    l.parse::<f64>()
                        .with_context(|| format!("{}: value {}: '{l}'", path.display(), k + 1))
                })
                .collect::<Result<Vec<f64>>>()?;
            ensure!(
                u.len() == mesh.num_vertices(),
                "initial_file: {} values for a mesh with {} vertices",
                u.len(),
                mesh.num_vertices()
            );
            return Ok(u);
        }
        let example = self.example.expect("validated");
        Ok(example.initial_condition(mesh, self.seed))
    }
}

/// Everything needed to replay a run: the resolved configuration plus the
/// producing version and mesh sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub output_dir: PathBuf,
    pub vertices: usize,
    pub triangles: usize,
    pub steps: usize,
    pub run: RunConfig,
}
