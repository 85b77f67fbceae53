//! Report envelopes, machine-readable payloads and the text renderer.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use htk_core::elliptic::RatPoint;
use htk_core::geometry::CheckResult;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: u64,
    pub tau: [f64; 2],
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub spec_name: String,
    pub provenance: Provenance,
    pub result: CommandResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommandResult {
    Analyze(AnalyzeResult),
    Rings(RingsResult),
    Hikita(HikitaResult),
    Verify(VerifyResult),
    Plot(PlotResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDto {
    pub pi: Vec<Vec<i64>>,
    pub iota: Vec<Vec<i64>>,
    pub pi_vee: Vec<Vec<i64>>,
    pub iota_vee: Vec<Vec<i64>>,
    pub section: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitDto {
    /// 0-based.
    pub support: Vec<usize>,
    pub coefficients: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointDto {
    pub subset: Vec<usize>,
    pub real: Vec<String>,
    /// `[s, t]` meaning `s + tτ`.
    pub elliptic: Vec<[String; 2]>,
    pub stabilizer_dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeResult {
    pub u: Vec<Vec<i64>>,
    pub gale_dual: Option<Vec<Vec<i64>>>,
    pub sequence: SequenceDto,
    pub circuits: Vec<CircuitDto>,
    pub unimodular: bool,
    pub unimodularity_witness: Option<(Vec<usize>, i64)>,
    pub simple: bool,
    pub simplicity_witnesses: Vec<Vec<usize>>,
    pub verdict: String,
    pub alpha: Vec<String>,
    pub beta: Vec<[String; 2]>,
    pub alpha_lift: Vec<String>,
    pub beta_lift: Vec<[String; 2]>,
    pub fixed_points: Option<Vec<FixedPointDto>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub left: String,
    pub right: String,
    pub product: String,
    pub oracle_match: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlavorTable {
    pub flavor: String,
    pub central_elements: Vec<String>,
    pub elements: Vec<String>,
    pub table: Vec<TableEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingsResult {
    pub degree_bound: u32,
    pub lattice_basis: Vec<Vec<i64>>,
    pub flavors: Vec<FlavorTable>,
    pub oracle_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealDto {
    pub rendered: String,
    pub generators: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDto {
    pub left: String,
    pub right: String,
    pub equal: bool,
    /// For each generator of the left ideal, the index of a dividing generator of the right.
    pub left_in_right: Vec<Option<usize>>,
    pub right_in_left: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictDto {
    pub status: String,
    pub all_equal: bool,
    pub certificates: Vec<CertificateDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HikitaResult {
    pub v: Vec<Vec<i64>>,
    pub alpha_hat: Vec<String>,
    pub unimodular: bool,
    pub within_hypotheses: bool,
    pub circuit_ideal: IdealDto,
    pub coinvariant_ideal: IdealDto,
    pub coinvariant_radius: u32,
    pub coinvariant_stable: bool,
    pub ell_presentation: IdealDto,
    /// `Z^{n+1}` degree of each circuit generator, in circuit order.
    pub ell_degrees: Vec<Vec<u32>>,
    pub specialized_ideal: IdealDto,
    pub verdict: VerdictDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckDto {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: Option<u64>,
    pub step: Option<f64>,
    pub samples: usize,
    /// Worst sample `(z, w, x)` as `[re, im]` pairs.
    pub point: Option<[[f64; 2]; 3]>,
}

impl From<&CheckResult> for CheckDto {
    fn from(c: &CheckResult) -> Self {
        CheckDto {
            name: c.name.clone(),
            residual: c.residual,
            tolerance: c.tolerance,
            pass: c.pass,
            seed: c.seed,
            step: c.step,
            samples: c.samples,
            point: c
                .point
                .map(|p| [[p.z.re, p.z.im], [p.w.re, p.w.im], [p.x.re, p.x.im]]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub truncation: u32,
    pub truncation_warning: bool,
    pub checks: Vec<CheckDto>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotResult {
    pub files: Vec<String>,
    pub hyperplanes: usize,
    pub marked_points: usize,
}

pub fn rat_str(x: &BigRational) -> String {
    x.to_string()
}

pub fn point_str(p: &RatPoint) -> [String; 2] {
    [p.s.to_string(), p.t.to_string()]
}

pub fn small(x: &BigInt) -> i64 {
    x.to_i64().expect("entry exceeds i64")
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = line(headers.iter().map(ToString::to_string).collect());
    out.push('\n');
    out.push_str(&line(widths.iter().map(|&w| "-".repeat(w)).collect()));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.clone()));
        out.push('\n');
    }
    out
}

fn vecs(v: &[Vec<i64>]) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|x| {
            format!(
                "({})",
                x.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "htk {} :: {} (schema {})",
            self.command, self.spec_name, self.schema_version
        );
        let p = &self.provenance;
        let _ = writeln!(
            out,
            "tool {}  seed {}  tau {}+{}i",
            p.tool_version, p.seed, p.tau[0], p.tau[1]
        );
        out.push('\n');
        match &self.result {
            CommandResult::Analyze(a) => render_analyze(&mut out, a),
            CommandResult::Rings(r) => render_rings(&mut out, r),
            CommandResult::Hikita(h) => render_hikita(&mut out, h),
            CommandResult::Verify(v) => render_verify(&mut out, v),
            CommandResult::Plot(p) => {
                let _ = writeln!(
                    out,
                    "hyperplanes {}  marked points {}",
                    p.hyperplanes, p.marked_points
                );
                for f in &p.files {
                    let _ = writeln!(out, "wrote {f}");
                }
            }
        }
        out
    }
}

fn render_analyze(out: &mut String, a: &AnalyzeResult) {
    let _ = writeln!(out, "u          {}", vecs(&a.u));
    let _ = writeln!(
        out,
        "gale dual  {}",
        a.gale_dual
            .as_deref()
            .map_or("(not primitive)".to_string(), vecs)
    );
    let _ = writeln!(out, "unimodular {}", yes(a.unimodular));
    if let Some((s, d)) = &a.unimodularity_witness {
        let _ = writeln!(out, "           witness {s:?} with determinant {d}");
    }
    let _ = writeln!(out, "simple     {}", yes(a.simple));
    let _ = writeln!(out, "verdict    {}", a.verdict);
    out.push('\n');
    let rows: Vec<Vec<String>> = a
        .circuits
        .iter()
        .map(|c| vec![format!("{:?}", c.support), format!("{:?}", c.coefficients)])
        .collect();
    let _ = writeln!(out, "{} circuit(s)", rows.len());
    out.push_str(&table(&["support", "coefficients"], &rows));
    out.push('\n');
    match &a.fixed_points {
        Some(fps) => {
            let rows: Vec<Vec<String>> = fps
                .iter()
                .map(|f| {
                    let ell: Vec<String> = f
                        .elliptic
                        .iter()
                        .map(|[s, t]| format!("{s}+({t})τ"))
                        .collect();
                    vec![
                        format!("{:?}", f.subset),
                        format!("({})", f.real.join(", ")),
                        format!("({})", ell.join(", ")),
                        f.stabilizer_dimension.to_string(),
                    ]
                })
                .collect();
            let _ = writeln!(out, "{} fixed point(s)", rows.len());
            out.push_str(&table(&["subset", "real", "elliptic", "stabilizer"], &rows));
        }
        None => {
            let _ = writeln!(
                out,
                "fixed points not enumerated: arrangement is not simple {:?}",
                a.simplicity_witnesses
            );
        }
    }
}

fn render_rings(out: &mut String, r: &RingsResult) {
    let _ = writeln!(
        out,
        "degree bound {}  lattice basis {}",
        r.degree_bound,
        vecs(&r.lattice_basis)
    );
    let _ = writeln!(out, "oracle consistent {}", yes(r.oracle_consistent));
    for f in &r.flavors {
        let _ = writeln!(
            out,
            "\n[{}] central elements: {}",
            f.flavor,
            f.central_elements.join(", ")
        );
        let rows: Vec<Vec<String>> = f
            .table
            .iter()
            .map(|e| {
                vec![
                    e.left.clone(),
                    e.right.clone(),
                    e.product.clone(),
                    yes(e.oracle_match).to_string(),
                ]
            })
            .collect();
        out.push_str(&table(&["left", "right", "product", "oracle"], &rows));
    }
}

fn render_hikita(out: &mut String, h: &HikitaResult) {
    let _ = writeln!(out, "v           {}", vecs(&h.v));
    let _ = writeln!(
        out,
        "unimodular  {}{}",
        yes(h.unimodular),
        if h.within_hypotheses {
            ""
        } else {
            " (outside hypotheses)"
        }
    );
    let _ = writeln!(out, "circuit     {}", h.circuit_ideal.rendered);
    let _ = writeln!(
        out,
        "coinvariant {}  (radius {}, {})",
        h.coinvariant_ideal.rendered,
        h.coinvariant_radius,
        if h.coinvariant_stable {
            "stable"
        } else {
            "not stable"
        }
    );
    let _ = writeln!(out, "ell         {}", h.ell_presentation.rendered);
    let _ = writeln!(out, "specialized {}", h.specialized_ideal.rendered);
    out.push('\n');
    let rows: Vec<Vec<String>> = h
        .verdict
        .certificates
        .iter()
        .map(|c| {
            vec![
                format!("{} vs {}", c.left, c.right),
                yes(c.equal).to_string(),
            ]
        })
        .collect();
    out.push_str(&table(&["comparison", "equal"], &rows));
    let _ = writeln!(out, "\nverdict {}", h.verdict.status);
}

fn render_verify(out: &mut String, v: &VerifyResult) {
    let rows: Vec<Vec<String>> = v
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                format!("{:.3e}", c.residual),
                format!("{:.1e}", c.tolerance),
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
                c.samples.to_string(),
                c.seed.map_or("-".into(), |s| s.to_string()),
            ]
        })
        .collect();
    out.push_str(&table(
        &[
            "check",
            "residual",
            "tolerance",
            "result",
            "samples",
            "seed",
        ],
        &rows,
    ));
    if v.truncation_warning {
        let _ = writeln!(
            out,
            "warning: |q|^{} exceeds the truncation tolerance",
            v.truncation
        );
    }
    let _ = writeln!(
        out,
        "\n{}",
        if v.all_pass {
            "all checks pass"
        } else {
            "some checks FAIL"
        }
    );
}
