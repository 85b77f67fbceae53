//! The five subcommands. Each returns a report together with the exit code it
//! implies; hard failures are returned as [`CliError`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use htk_core::arrangement::{build_arrangement, ArrangementError, CombinedArrangement, FixedPoint};
use htk_core::elliptic::{DEFAULT_TRUNCATION, TRUNCATION_TOL};
use htk_core::geometry::{self, CheckResult, FIBER_TOL};
use htk_core::hikita::hikita_verify;
use htk_core::ideal::{IdealComparison, ThetaMonomialIdeal};
use htk_core::lattice::{circuits, gale_dual, LatticeError, VectorConfig};
use htk_core::matrix::IntMatrix;
use htk_core::oracle::monomial_oracle_mul;
use htk_core::rings::{BranchRing, Flavor, RingError};
use thiserror::Error;

use crate::plot::{self, PlotError};
use crate::report::*;
use crate::spec::{ProblemSpec, SpecError};

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const DEGENERATE: i32 = 3;
    pub const ORACLE_MISMATCH: i32 = 4;
    pub const HIKITA_FAIL: i32 = 5;
    pub const NON_GENERIC_ALPHA: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let lattice = |e: &LatticeError| match e {
            LatticeError::DegenerateConfig(_) => exit::DEGENERATE,
            LatticeError::NonGenericAlpha { .. } => exit::NON_GENERIC_ALPHA,
            LatticeError::DimensionMismatch { .. } => exit::PARSE,
        };
        match self {
            CliError::Spec(SpecError::Lattice(e)) | CliError::Lattice(e) => lattice(e),
            CliError::Spec(_) => exit::PARSE,
            CliError::Arrangement(ArrangementError::Lattice(e)) => lattice(e),
            CliError::Arrangement(ArrangementError::DimensionMismatch { .. }) => exit::PARSE,
            CliError::Arrangement(ArrangementError::NotSimple { .. }) => exit::FAILURE,
            CliError::Ring(RingError::Lattice(e)) => lattice(e),
            CliError::Ring(_) | CliError::Plot(_) | CliError::Write { .. } => exit::FAILURE,
        }
    }
}

/// Command-line overrides of the spec's `[options]`.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub radius: Option<u32>,
    pub degree: Option<u32>,
    pub samples: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, spec: &mut ProblemSpec) {
        let o = &mut spec.options;
        if let Some(s) = self.seed {
            o.seed = s;
        }
        if self.radius.is_some() {
            o.radius = self.radius;
        }
        if let Some(d) = self.degree {
            o.degree = d;
        }
        if let Some(k) = self.samples {
            o.samples = k;
        }
    }
}

pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

fn envelope(
    command: &str,
    spec: &ProblemSpec,
    tolerances: BTreeMap<String, f64>,
    result: CommandResult,
) -> Report {
    Report {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        spec_name: spec.name.clone(),
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: spec.options.seed,
            tau: [spec.tau.re, spec.tau.im],
            tolerances,
        },
        result,
    }
}

fn exact() -> BTreeMap<String, f64> {
    BTreeMap::from([("exact".to_string(), 0.0)])
}

fn rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.to_i64_rows().expect("entry exceeds i64")
}

fn config_rows(c: &VectorConfig) -> Vec<Vec<i64>> {
    c.to_i64().expect("entry exceeds i64")
}

fn arrangement(spec: &ProblemSpec) -> Result<CombinedArrangement, CliError> {
    let u = spec.u()?;
    Ok(build_arrangement(
        &u,
        &spec.alpha,
        &spec.beta,
        &spec.modular_param(),
    )?)
}

/// Fixed points when the arrangement is simple, otherwise `None`.
fn fixed_points(arr: &CombinedArrangement) -> Result<Option<Vec<FixedPoint>>, CliError> {
    match arr.fixed_points() {
        Ok(f) => Ok(Some(f)),
        Err(ArrangementError::NotSimple { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn analyze(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let arr = arrangement(spec)?;
    let u = &arr.config;
    let seq = &arr.sequence;
    let smooth = arr.smoothness_report();
    let fps = fixed_points(&arr)?.map(|fps| {
        fps.iter()
            .map(|f| FixedPointDto {
                subset: f.subset.clone(),
                real: f.point.real.iter().map(rat_str).collect(),
                elliptic: f.point.elliptic.iter().map(point_str).collect(),
                stabilizer_dimension: arr.stabilizer_dimension(&f.point),
            })
            .collect()
    });
    let result = AnalyzeResult {
        u: config_rows(u),
        gale_dual: gale_dual(u).ok().map(|g| config_rows(&g)),
        sequence: SequenceDto {
            pi: rows(&seq.pi),
            iota: rows(&seq.iota),
            pi_vee: rows(&seq.pi_vee),
            iota_vee: rows(&seq.iota_vee),
            section: rows(&seq.section),
        },
        circuits: circuits(u)
            .iter()
            .map(|c| CircuitDto {
                support: c.support.clone(),
                coefficients: c.coefficients.iter().map(small).collect(),
            })
            .collect(),
        unimodular: smooth.unimodular,
        unimodularity_witness: smooth
            .unimodularity_witness
            .as_ref()
            .map(|(s, d)| (s.clone(), small(d))),
        simple: smooth.simple,
        simplicity_witnesses: smooth.simplicity_witnesses.clone(),
        verdict: smooth.verdict.as_str().to_string(),
        alpha: spec.alpha.iter().map(rat_str).collect(),
        beta: spec.beta.iter().map(point_str).collect(),
        alpha_lift: arr.alpha_lift().iter().map(rat_str).collect(),
        beta_lift: arr.beta_lift().iter().map(point_str).collect(),
        fixed_points: fps,
    };
    Ok(Outcome {
        report: envelope("analyze", spec, exact(), CommandResult::Analyze(result)),
        exit_code: exit::OK,
    })
}

fn flavor_table(ring: &BranchRing, degree: u32) -> Result<FlavorTable, CliError> {
    let mut elements = vec![ring.unit()];
    if degree > 0 {
        elements.extend(ring.generators(Some(degree)));
    }
    let names = ring.coeff_names();
    let mut table = Vec::new();
    for (i, a) in elements.iter().enumerate() {
        for b in &elements[i..] {
            let product = ring.mul(a, b)?;
            let oracle = monomial_oracle_mul(ring, a, b)?;
            table.push(TableEntry {
                left: ring.render(a),
                right: ring.render(b),
                product: ring.render(&product),
                oracle_match: product == oracle,
            });
        }
    }
    Ok(FlavorTable {
        flavor: ring.flavor().as_str().to_string(),
        central_elements: (0..ring.n())
            .map(|i| ring.central_element(i).render(&names))
            .collect(),
        elements: elements.iter().map(|e| ring.render(e)).collect(),
        table,
    })
}

pub fn rings(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let u = spec.u()?;
    let degree = spec.options.degree;
    let mut flavors = Vec::new();
    let mut basis = Vec::new();
    for flavor in [Flavor::Additive, Flavor::Multiplicative, Flavor::Elliptic] {
        let ring = BranchRing::new(flavor, &u);
        basis = rows(ring.lattice_basis());
        flavors.push(flavor_table(&ring, degree)?);
    }
    let consistent = flavors
        .iter()
        .all(|f| f.table.iter().all(|e| e.oracle_match));
    let result = RingsResult {
        degree_bound: degree,
        lattice_basis: basis,
        flavors,
        oracle_consistent: consistent,
    };
    Ok(Outcome {
        report: envelope("rings", spec, exact(), CommandResult::Rings(result)),
        exit_code: if consistent {
            exit::OK
        } else {
            exit::ORACLE_MISMATCH
        },
    })
}

fn ideal_dto(i: &ThetaMonomialIdeal) -> IdealDto {
    IdealDto {
        rendered: i.to_string(),
        generators: i.generators().to_vec(),
    }
}

fn certificate(left: &str, right: &str, c: &IdealComparison) -> CertificateDto {
    CertificateDto {
        left: left.to_string(),
        right: right.to_string(),
        equal: c.equal,
        left_in_right: c.left_in_right.clone(),
        right_in_left: c.right_in_left.clone(),
    }
}

pub fn hikita(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let v = spec.v()?;
    let radius = spec.options.radius.unwrap_or(v.n() as u32);
    let r = hikita_verify(&v, &spec.alpha_hat, radius)?;
    let verdict = VerdictDto {
        status: r.verdict().to_string(),
        all_equal: r.all_equal(),
        certificates: vec![
            certificate("circuit", "coinvariant", &r.circuit_vs_coinvariant),
            certificate("circuit", "specialized", &r.circuit_vs_specialized),
            certificate("coinvariant", "specialized", &r.coinvariant_vs_specialized),
        ],
    };
    let result = HikitaResult {
        v: config_rows(&v),
        alpha_hat: spec.alpha_hat.iter().map(rat_str).collect(),
        unimodular: r.unimodular,
        within_hypotheses: r.unimodular,
        circuit_ideal: ideal_dto(&r.circuit),
        coinvariant_ideal: ideal_dto(&r.coinvariant.ideal),
        coinvariant_radius: r.coinvariant.radius,
        coinvariant_stable: r.coinvariant.stable,
        ell_presentation: ideal_dto(&r.presentation.ideal),
        ell_degrees: r.presentation.degrees.clone(),
        specialized_ideal: ideal_dto(&r.specialized),
        verdict,
    };
    let code = if r.all_equal() {
        exit::OK
    } else {
        exit::HIKITA_FAIL
    };
    Ok(Outcome {
        report: envelope("hikita", spec, exact(), CommandResult::Hikita(result)),
        exit_code: code,
    })
}

/// Fiber-scan grid resolution.
const FIBER_GRID: u32 = 8;

pub fn verify(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let m = spec.modular_param();
    let (samples, seed, h) = (spec.options.samples, spec.options.seed, spec.options.step);
    let checks: Vec<CheckResult> = vec![
        geometry::theta_quasi_periodicity_check(&m, samples, seed),
        geometry::theta_zero_check(&m),
        geometry::theta_oddness_check(&m, samples, seed),
        geometry::automorphy_cocycle_check(&m, samples, seed),
        geometry::e_moment_suite(&m, samples, seed, h).0,
        geometry::e_moment_convergence_check(&m, samples, seed, h),
        geometry::gamma_equivariance_suite(&m, samples, seed),
        geometry::fiber_scan_check(&m, FIBER_GRID),
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    let tolerances: BTreeMap<String, f64> = checks
        .iter()
        .map(|c| (c.name.clone(), c.tolerance))
        .chain([
            ("fiber".to_string(), FIBER_TOL),
            ("truncation".to_string(), TRUNCATION_TOL),
        ])
        .collect();
    let result = VerifyResult {
        truncation: DEFAULT_TRUNCATION,
        truncation_warning: m.q().norm().powi(DEFAULT_TRUNCATION as i32) > TRUNCATION_TOL,
        checks: checks.iter().map(CheckDto::from).collect(),
        all_pass,
    };
    Ok(Outcome {
        report: envelope("verify", spec, tolerances, CommandResult::Verify(result)),
        exit_code: if all_pass { exit::OK } else { exit::FAILURE },
    })
}

/// Writes `PREFIX_real.svg` and `PREFIX_elliptic.svg`.
pub fn plot(spec: &ProblemSpec, prefix: &Path) -> Result<Outcome, CliError> {
    let arr = arrangement(spec)?;
    let points = match fixed_points(&arr)? {
        Some(f) => f,
        None => arr.intersection_points_unchecked(),
    };
    let data = plot::PlotData::new(&arr, &points)?;
    let mut files = Vec::new();
    for (suffix, svg) in [("real", data.real_svg()), ("elliptic", data.elliptic_svg())] {
        let path = PathBuf::from(format!("{}_{suffix}.svg", prefix.display()));
        std::fs::write(&path, svg).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        })?;
        files.push(path.display().to_string());
    }
    let result = PlotResult {
        files,
        hyperplanes: arr.n(),
        marked_points: points.len(),
    };
    Ok(Outcome {
        report: envelope("plot", spec, exact(), CommandResult::Plot(result)),
        exit_code: exit::OK,
    })
}
