//! TOML run configuration.

use crate::geometry::{Field, FormType, TorusGrid, P1_DEFAULT_ANGULAR, P1_DEFAULT_RADIAL};
use crate::higgs::QuadrupletSpec;
use crate::reduction::Normalization;
use crate::stability::{CatalogEntry, QuadInvariants};
use crate::vortex::{constants_from_sigma, constants_from_tau, SolveOptions, VortexConstants};
use crate::{CMat, Error, Result, C64};
use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::PathBuf;

/// An exact rational given as an integer or a "p/q" string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalValue {
    Int(i64),
    Text(String),
}

impl RationalValue {
    pub fn parse(&self) -> Result<BigRational> {
        match self {
            RationalValue::Int(n) => Ok(BigRational::from_integer(BigInt::from(*n))),
            RationalValue::Text(s) => {
                let s = s.trim();
                let (p, q) = s.split_once('/').unwrap_or((s, "1"));
                let p: BigInt = p.trim().parse().map_err(|_| Error::Config(format!("bad rational {s:?}")))?;
                let q: BigInt = q.trim().parse().map_err(|_| Error::Config(format!("bad rational {s:?}")))?;
                if q == BigInt::from(0) {
                    return Err(Error::Config(format!("zero denominator in {s:?}")));
                }
                Ok(BigRational::new(p, q))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub p1_radial: usize,
    pub p1_angular: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { p1_radial: P1_DEFAULT_RADIAL, p1_angular: P1_DEFAULT_ANGULAR }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub tau: Option<RationalValue>,
    pub sigma: Option<RationalValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundlesConfig {
    pub e1_degrees: Vec<i64>,
    pub e2_degrees: Vec<i64>,
}

/// How to fill one matrix field. `re`/`im` are row-major matrices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    #[default]
    Zero,
    Constant {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
    /// M·cos(2π(kx·x + ky·y)); not holomorphic unless kx = ky = 0.
    Mode {
        kx: i32,
        ky: i32,
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
}

fn matrix(name: &str, rows: usize, cols: usize, re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>) -> Result<CMat> {
    let shape_ok = |m: &[Vec<f64>]| m.len() == rows && m.iter().all(|r| r.len() == cols);
    if !shape_ok(re) || im.is_some_and(|m| !shape_ok(m)) {
        return Err(Error::Config(format!("fields.{name}: expected a {rows}x{cols} matrix")));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| C64::new(re[i][j], im.map_or(0.0, |m| m[i][j]))))
}

impl FieldSpec {
    pub fn build(&self, name: &str, grid: &TorusGrid, rows: usize, cols: usize, form: FormType) -> Result<Field> {
        match self {
            FieldSpec::Zero => Ok(Field::zeros(grid, rows, cols, form)),
            FieldSpec::Constant { re, im } => {
                Ok(Field::constant(grid, &matrix(name, rows, cols, re, im.as_ref())?, form))
            }
            FieldSpec::Mode { kx, ky, re, im } => {
                let m = matrix(name, rows, cols, re, im.as_ref())?;
                let (kx, ky) = (*kx as f64, *ky as f64);
                Ok(Field::from_fn(grid, rows, cols, form, |x, y| &m * C64::from((2.0 * PI * (kx * x + ky * y)).cos())))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsConfig {
    #[serde(default)]
    pub theta1: FieldSpec,
    #[serde(default)]
    pub theta2: FieldSpec,
    #[serde(default)]
    pub phi: FieldSpec,
    #[serde(default)]
    pub psi: FieldSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub constraint: f64,
    pub trace_identity: f64,
    pub deg_p1: f64,
    pub fs_constant: f64,
    pub he_residual: f64,
    pub off_diagonal: f64,
    pub integrability: f64,
    pub integrability_broken: f64,
    pub calibration: f64,
    pub iota: f64,
    pub quaternion: f64,
    pub moment_map: f64,
    pub equivariance: f64,
    pub psi_norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            constraint: 1e-9,
            trace_identity: 1e-8,
            deg_p1: 1e-6,
            fs_constant: 1e-8,
            he_residual: 1e-6,
            off_diagonal: 1e-8,
            integrability: 1e-9,
            integrability_broken: 1e-2,
            calibration: 1e-10,
            iota: 1e-12,
            quaternion: 1e-12,
            moment_map: 1e-6,
            equivariance: 1e-10,
            psi_norm: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraSubobject {
    pub r1: u32,
    pub r2: u32,
    pub d1: i64,
    pub d2: i64,
    #[serde(default = "default_provenance")]
    pub provenance: String,
}

fn default_provenance() -> String {
    crate::stability::PROVENANCE_USER.to_string()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    /// Sub-objects beyond the coordinate ones (e.g. degree-lowered subsheaves).
    #[serde(default)]
    pub extra: Vec<ExtraSubobject>,
}

impl StabilityConfig {
    pub fn entries(&self) -> Vec<CatalogEntry> {
        self.extra
            .iter()
            .map(|e| CatalogEntry::new(QuadInvariants::new(e.r1, e.r2, e.d1, e.d2), &e.provenance))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReductionConfig {
    pub samples: usize,
    pub normalization: Normalization,
    pub iota_sets: usize,
    pub seed: u64,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig { samples: 200, normalization: Normalization::Split, iota_sets: 50, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperkahlerConfig {
    pub n: usize,
    pub samples: usize,
    pub fd_step: f64,
    pub seed: u64,
}

impl Default for HyperkahlerConfig {
    fn default() -> Self {
        HyperkahlerConfig { n: 32, samples: 100, fd_step: 1e-4, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub report: String,
    pub history: String,
    pub catalog: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            report: "report.json".into(),
            history: "history.csv".into(),
            catalog: "catalog.csv".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    pub constants: ConstantsConfig,
    pub bundles: BundlesConfig,
    #[serde(default)]
    pub fields: FieldsConfig,
    #[serde(default)]
    pub solver: SolveOptions,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub stability: StabilityConfig,
    #[serde(default)]
    pub reduction: ReductionConfig,
    #[serde(default)]
    pub hyperkahler: HyperkahlerConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    /// Parse and validate. Syntax errors carry the line and key from the TOML parser.
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.constants.tau, &self.constants.sigma) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::Config("constants: give exactly one of tau, sigma".into()))
            }
            _ => {}
        }
        TorusGrid::new(self.grid.n).map_err(|e| Error::Config(format!("grid.n: {e}")))?;
        TorusGrid::new(self.hyperkahler.n).map_err(|e| Error::Config(format!("hyperkahler.n: {e}")))?;
        if self.quadrature.p1_radial < 8 || self.quadrature.p1_angular < 8 {
            return Err(Error::Config("quadrature: resolutions must be at least 8".into()));
        }
        if self.bundles.e1_degrees.is_empty() || self.bundles.e2_degrees.is_empty() {
            return Err(Error::Config("bundles: both degree lists must be non-empty".into()));
        }
        let t = &self.tolerances;
        let all = [
            t.constraint,
            t.trace_identity,
            t.deg_p1,
            t.fs_constant,
            t.he_residual,
            t.off_diagonal,
            t.integrability,
            t.integrability_broken,
            t.calibration,
            t.iota,
            t.quaternion,
            t.moment_map,
            t.equivariance,
            t.psi_norm,
        ];
        if all.iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(Error::Config("tolerances: all tolerances must be positive".into()));
        }
        let s = &self.solver;
        if !(s.step > 0.0 && s.target_residual > 0.0 && s.damping >= 0.0 && s.max_iter > 0) {
            return Err(Error::Config("solver: step, target_residual must be positive, damping non-negative".into()));
        }
        if self.hyperkahler.fd_step.is_nan() || self.hyperkahler.fd_step <= 0.0 {
            return Err(Error::Config("hyperkahler.fd_step must be positive".into()));
        }
        Ok(())
    }

    pub fn ranks(&self) -> (u32, u32) {
        (self.bundles.e1_degrees.len() as u32, self.bundles.e2_degrees.len() as u32)
    }

    pub fn constants(&self) -> Result<VortexConstants> {
        let (r1, r2) = self.ranks();
        let d1 = self.bundles.e1_degrees.iter().sum();
        let d2 = self.bundles.e2_degrees.iter().sum();
        match (&self.constants.tau, &self.constants.sigma) {
            (Some(t), None) => constants_from_tau(&t.parse()?, r1, r2, d1, d2),
            (None, Some(s)) => constants_from_sigma(&s.parse()?, r1, r2, d1, d2),
            _ => Err(Error::Config("constants: give exactly one of tau, sigma".into())),
        }
    }

    pub fn quadruplet(&self) -> Result<QuadrupletSpec> {
        let grid = TorusGrid::new(self.grid.n)?;
        let (r1, r2) = (self.bundles.e1_degrees.len(), self.bundles.e2_degrees.len());
        let f = &self.fields;
        QuadrupletSpec::new(
            grid.clone(),
            self.bundles.e1_degrees.clone(),
            self.bundles.e2_degrees.clone(),
            f.theta1.build("theta1", &grid, r1, r1, FormType::OneZero)?,
            f.theta2.build("theta2", &grid, r2, r2, FormType::OneZero)?,
            f.phi.build("phi", &grid, r2, r1, FormType::Function)?,
            f.psi.build("psi", &grid, r1, r2, FormType::Function)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PSI: &str = r#"
[grid]
n = 8
[constants]
sigma = 2
[bundles]
e1_degrees = [0]
e2_degrees = [0]
[fields]
psi = { kind = "constant", re = [[1.0]] }
"#;

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::from_toml(PSI).unwrap();
        assert_eq!(c.constants().unwrap().tau, BigRational::from_integer(1.into()));
        let q = c.quadruplet().unwrap();
        assert_eq!(q.psi.values[0][(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(c.reduction.samples, 200);
    }

    #[test]
    fn rational_strings() {
        assert_eq!(RationalValue::Text("-3/6".into()).parse().unwrap(), BigRational::new((-1).into(), 2.into()));
        assert!(RationalValue::Text("1/0".into()).parse().is_err());
        assert!(RationalValue::Text("x".into()).parse().is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let both = PSI.replace("sigma = 2", "sigma = 2\ntau = 1");
        assert!(RunConfig::from_toml(&both).is_err());
        let unknown = PSI.replace("n = 8", "n = 8\nsize = 3");
        let e = RunConfig::from_toml(&unknown).unwrap_err().to_string();
        assert!(e.contains("size"), "{e}");
        let odd = PSI.replace("n = 8", "n = 7");
        assert!(RunConfig::from_toml(&odd).is_err());
        let shape = PSI.replace("re = [[1.0]]", "re = [[1.0, 2.0]]");
        assert!(RunConfig::from_toml(&shape).unwrap().quadruplet().is_err());
    }
}
