//! Scenario files: TOML with rational-string numerics, so exact lattice and
//! representation data survives parsing.

use std::sync::Arc;

use serde::Deserialize;

use conetheta::jordan::AlgebraDescriptor;
use conetheta::lattice::Lattice;
use conetheta::rational::{parse_rational, RMat};
use conetheta::representation::{
    normalize_basepoint, reduce_domain, symmetrize_psi, RawRepresentation, RepresentationConfig,
};
use conetheta::suite::{CheckKind, SuiteSpec, ToleranceSet};
use conetheta::{Complex64, Config64};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_points")]
    pub sample_points: usize,
    pub representation: RepresentationSpec,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub points: Vec<EvalPoint>,
    #[serde(default)]
    pub checks: ChecksSpec,
}

fn default_seed() -> u64 {
    7
}

fn default_points() -> usize {
    20
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationSpec {
    pub kind: String,
    pub n: Option<usize>,
    pub d: Option<usize>,
    #[serde(default)]
    pub summands: Vec<String>,
    /// Custom configurations: explicit data as rational strings.
    pub rho: Option<Vec<Vec<String>>>,
    pub psi_basis: Option<Vec<Vec<Vec<String>>>>,
    pub base_point: Option<Vec<String>>,
    pub sigma: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    /// Rows are basis vectors, entries rational strings.
    pub basis: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalPoint {
    pub z_re: Vec<String>,
    pub z_im: Vec<String>,
    #[serde(default)]
    pub u_re: Vec<String>,
    #[serde(default)]
    pub u_im: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSpec {
    /// Check names; empty means every check applicable to the configuration.
    #[serde(default)]
    pub run: Vec<String>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub identity: Option<f64>,
    pub algebraic: Option<f64>,
    pub poisson: Option<f64>,
    pub constants: Option<f64>,
    pub jordan: Option<f64>,
    pub gaussian_1d: Option<f64>,
    pub gaussian_2d: Option<f64>,
    pub fourier: Option<f64>,
    pub certification: Option<f64>,
}

/// A loaded, validated scenario ready to run.
pub struct Scenario {
    pub name: String,
    pub rep: Config64,
    pub lat: Lattice,
    pub spec: SuiteSpec,
    pub eval_points: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

#[derive(Debug)]
pub struct ScenarioError(pub String);

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ScenarioError {}

fn err(msg: impl Into<String>) -> ScenarioError {
    ScenarioError(msg.into())
}

fn parse_rmat(rows: &[Vec<String>], what: &str) -> Result<RMat, ScenarioError> {
    if rows.is_empty() {
        return Err(err(format!("{what}: empty matrix")));
    }
    let cols = rows[0].len();
    let mut data = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(err(format!("{what}: row {i} has ragged length")));
        }
        let mut parsed = Vec::with_capacity(cols);
        for (j, s) in row.iter().enumerate() {
            parsed.push(
                parse_rational(s)
                    .map_err(|e| err(format!("{what}[{i}][{j}] = {s:?}: {e}")))?,
            );
        }
        data.push(parsed);
    }
    Ok(RMat::from_rows(data))
}

fn parse_descriptor_token(token: &str) -> Result<Arc<AlgebraDescriptor>, ScenarioError> {
    let (kind, arg) = match token.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a.trim())),
        None => (token.trim(), None),
    };
    let need = |name: &str| -> Result<usize, ScenarioError> {
        arg.ok_or_else(|| err(format!("{name} needs a size, e.g. \"{name}:2\"")))?
            .parse()
            .map_err(|_| err(format!("{name}: bad size {arg:?}")))
    };
    match kind {
        "real_line" => Ok(AlgebraDescriptor::real_line()),
        "sym_real" => AlgebraDescriptor::sym_real(need("sym_real")?)
            .map_err(|e| err(e.to_string())),
        "herm_complex" => AlgebraDescriptor::herm_complex(need("herm_complex")?)
            .map_err(|e| err(e.to_string())),
        "spin_factor" => AlgebraDescriptor::spin_factor(need("spin_factor")?)
            .map_err(|e| err(e.to_string())),
        other => Err(err(format!("unknown algebra kind {other:?}"))),
    }
}

fn build_representation(
    spec: &RepresentationSpec,
    lat: Lattice,
) -> Result<(Config64, Lattice), ScenarioError> {
    let natural = |d: &Arc<AlgebraDescriptor>| {
        RepresentationConfig::natural(d).map_err(|e| err(e.to_string()))
    };
    match spec.kind.as_str() {
        "real_line" => Ok((natural(&AlgebraDescriptor::real_line())?, lat)),
        "sym_real" => {
            let n = spec.n.ok_or_else(|| err("sym_real needs `n`"))?;
            let d = AlgebraDescriptor::sym_real(n).map_err(|e| err(e.to_string()))?;
            Ok((natural(&d)?, lat))
        }
        "herm_complex" => {
            let n = spec.n.ok_or_else(|| err("herm_complex needs `n`"))?;
            let d = AlgebraDescriptor::herm_complex(n).map_err(|e| err(e.to_string()))?;
            Ok((natural(&d)?, lat))
        }
        "spin_factor" => {
            let d = spec.d.ok_or_else(|| err("spin_factor needs `d`"))?;
            let d = AlgebraDescriptor::spin_factor(d).map_err(|e| err(e.to_string()))?;
            Ok((natural(&d)?, lat))
        }
        "direct_sum" => {
            if spec.summands.is_empty() {
                return Err(err("direct_sum needs `summands`"));
            }
            let parts = spec
                .summands
                .iter()
                .map(|t| parse_descriptor_token(t))
                .collect::<Result<Vec<_>, _>>()?;
            let d = AlgebraDescriptor::direct_sum(parts).map_err(|e| err(e.to_string()))?;
            Ok((natural(&d)?, lat))
        }
        "custom" => {
            let rho = parse_rmat(
                spec.rho.as_ref().ok_or_else(|| err("custom needs `rho`"))?,
                "rho",
            )?;
            let psi = spec
                .psi_basis
                .as_ref()
                .ok_or_else(|| err("custom needs `psi_basis`"))?
                .iter()
                .enumerate()
                .map(|(k, m)| parse_rmat(m, &format!("psi_basis[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let base = spec
                .base_point
                .as_ref()
                .ok_or_else(|| err("custom needs `base_point`"))?
                .iter()
                .map(|s| parse_rational(s).map_err(|e| err(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let sigma = spec
                .sigma
                .as_ref()
                .map(|m| parse_rmat(m, "sigma"))
                .transpose()?;
            let raw =
                RawRepresentation::new(rho, psi, base).map_err(|e| err(e.to_string()))?;
            // Custom data runs the whole normalization pipeline.
            let sym = symmetrize_psi(&raw);
            let red = reduce_domain(&sym).map_err(|e| err(e.to_string()))?;
            let (norm, lat) =
                normalize_basepoint(&red, &lat).map_err(|e| err(e.to_string()))?;
            let rep = RepresentationConfig::from_raw(&norm, sigma)
                .map_err(|e| err(e.to_string()))?;
            Ok((rep, lat))
        }
        other => Err(err(format!("unknown representation kind {other:?}"))),
    }
}

fn parse_cvec(
    re: &[String],
    im: &[String],
    dim: usize,
    what: &str,
) -> Result<Vec<Complex64>, ScenarioError> {
    if re.len() != dim || im.len() != dim {
        return Err(err(format!(
            "{what}: expected {dim} coordinates, got re={} im={}",
            re.len(),
            im.len()
        )));
    }
    let to_f = |s: &String| -> Result<f64, ScenarioError> {
        use num_traits::ToPrimitive;
        parse_rational(s)
            .map_err(|e| err(format!("{what}: {e}")))?
            .to_f64()
            .ok_or_else(|| err(format!("{what}: {s:?} out of range")))
    };
    re.iter()
        .zip(im)
        .map(|(r, i)| Ok(Complex64::new(to_f(r)?, to_f(i)?)))
        .collect()
}

pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| err(format!("scenario parse error: {e}")))?;
    let basis_rows = parse_rmat(&file.lattice.basis, "lattice.basis")?;
    // Rows in the file are basis vectors; columns internally.
    let lat = Lattice::new(basis_rows.transpose()).map_err(|e| err(e.to_string()))?;
    let (rep, lat) = build_representation(&file.representation, lat)?;
    if lat.dim() != rep.dim_u() {
        return Err(err(format!(
            "lattice dimension {} does not match dim U = {}",
            lat.dim(),
            rep.dim_u()
        )));
    }

    let mut checks = Vec::new();
    if file.checks.run.is_empty() {
        for &k in CheckKind::all() {
            if k.applicable(&rep).is_ok() {
                checks.push(k);
            }
        }
    } else {
        for name in &file.checks.run {
            let kind = CheckKind::parse(name)
                .ok_or_else(|| err(format!("unknown check {name:?}")))?;
            kind.applicable(&rep)
                .map_err(|e| err(format!("check {name:?} not applicable: {e}")))?;
            checks.push(kind);
        }
    }

    let mut tolerances = ToleranceSet::default();
    let o = &file.checks.tolerances;
    if let Some(v) = o.identity {
        tolerances.identity = v;
    }
    if let Some(v) = o.algebraic {
        tolerances.algebraic = v;
    }
    if let Some(v) = o.poisson {
        tolerances.poisson = v;
    }
    if let Some(v) = o.constants {
        tolerances.constants = v;
    }
    if let Some(v) = o.jordan {
        tolerances.jordan = v;
    }
    if let Some(v) = o.gaussian_1d {
        tolerances.gaussian_1d = v;
    }
    if let Some(v) = o.gaussian_2d {
        tolerances.gaussian_2d = v;
    }
    if let Some(v) = o.fourier {
        tolerances.fourier = v;
    }
    if let Some(v) = o.certification {
        tolerances.certification = v;
    }

    let eval_points = file
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let z = parse_cvec(&p.z_re, &p.z_im, rep.dim_v(), &format!("points[{i}].z"))?;
            let (ur, ui);
            let zero = vec!["0".to_string(); rep.dim_u()];
            ur = if p.u_re.is_empty() { &zero } else { &p.u_re };
            ui = if p.u_im.is_empty() { &zero } else { &p.u_im };
            let u = parse_cvec(ur, ui, rep.dim_u(), &format!("points[{i}].u"))?;
            Ok((z, u))
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;

    let mut spec = SuiteSpec::new(&file.name, file.seed);
    spec.points = file.sample_points;
    spec.checks = checks;
    spec.tolerances = tolerances;

    Ok(Scenario {
        name: file.name,
        rep,
        lat,
        spec,
        eval_points,
    })
}

/// Bundled scenarios, embedded in the binary.
pub const BUNDLED: &[(&str, &str)] = &[
    ("classical", include_str!("../scenarios/classical.toml")),
    ("scaled", include_str!("../scenarios/scaled.toml")),
    ("siegel_genus2", include_str!("../scenarios/siegel_genus2.toml")),
    ("hermitian", include_str!("../scenarios/hermitian.toml")),
    ("spin", include_str!("../scenarios/spin.toml")),
    ("direct_sum", include_str!("../scenarios/direct_sum.toml")),
    ("sheared", include_str!("../scenarios/sheared.toml")),
];

/// Resolves a scenario argument: bundled name, then a path, then a file in
/// the scenario directory (`CONETHETA_SCENARIO_DIR`).
pub fn resolve_scenario(arg: &str) -> Result<Scenario, ScenarioError> {
    for (name, text) in BUNDLED {
        if *name == arg {
            return load_scenario(text);
        }
    }
    let path = std::path::Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(format!("cannot read {arg}: {e}")))?;
        return load_scenario(&text);
    }
    if let Ok(dir) = std::env::var("CONETHETA_SCENARIO_DIR") {
        let candidate = std::path::Path::new(&dir).join(format!("{arg}.toml"));
        if candidate.exists() {
            let text = std::fs::read_to_string(&candidate)
                .map_err(|e| err(format!("cannot read {}: {e}", candidate.display())))?;
            return load_scenario(&text);
        }
    }
    Err(err(format!(
        "scenario {arg:?} is neither bundled, a readable path, nor in CONETHETA_SCENARIO_DIR"
    )))
}
