//! Machine-readable reports and the analysis pipeline behind the CLI.
//!
//! Reports are schema-stable JSON, deterministic for a fixed input and
//! seed. Extended reals serialize as numbers when finite and as the strings
//! `"inf"` / `"-inf"` otherwise.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::generate::{achievable_combos, generate_case};
use crate::inclusion::{verify_spectral_inclusion, InclusionCase, InclusionVerdict};
use crate::operator::KreinOperator;
use crate::quotient::{
    build_quotient, verify_sigma_match, wco_closure_endpoints, zero_resolvent_criterion,
    SigmaMatchReport, WcoClosureCase, ZeroResolvent,
};
use crate::ranges::{
    estimate_endpoint, outside_theorem, predict_w, predict_wco, sample_range, EndpointSide,
    RangeKind, RangeReport, Violation,
};
use crate::realset::{ExtReal, RealSet};
use crate::space::SubspaceClass;
use crate::spectral::{compute_spectrum, SignType, SpectralData};
use crate::tol::Tolerances;

/// Endpoint estimates must land this close to the predicted endpoints.
pub const ENDPOINT_TOL: f64 = 1e-6;
/// Closure comparisons between the quotient spectrum and the predicted
/// co-numerical range.
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub samples: usize,
    pub seed: u64,
    pub strict: bool,
    pub tol: Tolerances,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            samples: 10_000,
            seed: 0,
            strict: false,
            tol: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OperatorMeta {
    pub dim: usize,
    pub inertia: [usize; 2],
    pub kernel_class: SubspaceClass,
    pub range_class: SubspaceClass,
    pub j_norm: f64,
    pub outside_theorem: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EigOut {
    pub value: f64,
    pub multiplicity: usize,
    pub sign_type: SignType,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ZeroOut {
    pub ker_dim: usize,
    pub ker2_dim: usize,
    pub chain_count: usize,
    pub s0_dim: usize,
    pub s0_plus_dim: usize,
    pub s0_minus_dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConstantsOut {
    pub mu_minus: ExtReal,
    pub mu_plus: ExtReal,
    pub nu_minus: ExtReal,
    pub nu_plus: ExtReal,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RealSetOut {
    pub display: String,
    #[serde(flatten)]
    pub set: RealSet,
}

impl RealSetOut {
    fn new(set: &RealSet) -> RealSetOut {
        RealSetOut {
            display: set.to_string(),
            set: set.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroResolventOut {
    pub predicted: bool,
    pub observed: bool,
    pub agree: bool,
}

impl From<ZeroResolvent> for ZeroResolventOut {
    fn from(zr: ZeroResolvent) -> Self {
        ZeroResolventOut {
            predicted: zr.predicted,
            observed: zr.observed,
            agree: zr.agree(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientReport {
    pub rank: usize,
    pub sigma: Vec<f64>,
    pub sigma_match: SigmaMatchReport,
    pub zero_resolvent: ZeroResolventOut,
    pub closure_lo: f64,
    pub closure_hi: f64,
    pub closure_case: WcoClosureCase,
    pub closure_matches_prediction: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InclusionReport {
    pub case: InclusionCase,
    pub degenerate_flag: bool,
    pub target: RealSetOut,
    pub spectrum_checked: Vec<crate::inclusion::CheckedPoint>,
    pub holds: bool,
    pub w_closure_holds: bool,
}

impl InclusionReport {
    fn new(v: &InclusionVerdict) -> InclusionReport {
        InclusionReport {
            case: v.case,
            degenerate_flag: v.degenerate_flag,
            target: RealSetOut::new(&v.target),
            spectrum_checked: v.spectrum_checked.clone(),
            holds: v.holds,
            w_closure_holds: v.w_closure_holds,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingOut {
    pub requested: usize,
    pub accepted: usize,
    pub rejected: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max: Option<f64>,
    pub violations: Vec<Violation>,
}

impl SamplingOut {
    fn new(requested: usize, r: &RangeReport) -> SamplingOut {
        SamplingOut {
            requested,
            accepted: r.samples.len(),
            rejected: r.rejected,
            min: r.min_sample(),
            max: r.max_sample(),
            violations: r.violations.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndpointOut {
    pub which: RangeKind,
    pub side: EndpointSide,
    pub predicted: f64,
    pub estimated: f64,
    pub error: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
    pub seed: u64,
    pub samples: usize,
    pub strict: bool,
    pub operator: OperatorMeta,
    pub spectrum: Vec<EigOut>,
    pub zero_structure: ZeroOut,
    pub constants: ConstantsOut,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub predicted_w: Option<RealSetOut>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub predicted_wco: Option<RealSetOut>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quotient: Option<QuotientReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inclusion: Option<InclusionReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sampling_w: Option<SamplingOut>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sampling_wco: Option<SamplingOut>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub endpoints: Option<Vec<EndpointOut>>,
    pub violations_total: usize,
    pub passed: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            3
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

fn meta(op: &KreinOperator, sd: &SpectralData) -> OperatorMeta {
    let (p, n) = op.space().inertia();
    OperatorMeta {
        dim: op.dim(),
        inertia: [p, n],
        kernel_class: sd.zero.kernel_class,
        range_class: sd.range_class,
        j_norm: op.j_norm(),
        outside_theorem: outside_theorem(op, sd),
    }
}

fn spectrum_out(sd: &SpectralData) -> (Vec<EigOut>, ZeroOut, ConstantsOut) {
    let eigs = sd
        .eigs
        .iter()
        .map(|e| EigOut {
            value: e.value,
            multiplicity: e.multiplicity,
            sign_type: e.sign_type,
        })
        .collect();
    let zero = ZeroOut {
        ker_dim: sd.zero.ker_basis.len(),
        ker2_dim: sd.zero.ker2_basis.len(),
        chain_count: sd.zero.chain_count,
        s0_dim: sd.zero.s0_dim,
        s0_plus_dim: sd.zero.s0_plus_dim,
        s0_minus_dim: sd.zero.s0_minus_dim,
    };
    let constants = ConstantsOut {
        mu_minus: ExtReal(sd.constants.mu_minus),
        mu_plus: ExtReal(sd.constants.mu_plus),
        nu_minus: ExtReal(sd.constants.nu_minus),
        nu_plus: ExtReal(sd.constants.nu_plus),
    };
    (eigs, zero, constants)
}

fn base_report(
    command: &str,
    op: &KreinOperator,
    sd: &SpectralData,
    label: Option<String>,
    opts: &RunOptions,
) -> Report {
    let (spectrum, zero_structure, constants) = spectrum_out(sd);
    Report {
        tool: "kreinrange".into(),
        version: crate::VERSION.into(),
        command: command.into(),
        label,
        seed: opts.seed,
        samples: opts.samples,
        strict: opts.strict,
        operator: meta(op, sd),
        spectrum,
        zero_structure,
        constants,
        predicted_w: None,
        predicted_wco: None,
        quotient: None,
        inclusion: None,
        sampling_w: None,
        sampling_wco: None,
        endpoints: None,
        violations_total: 0,
        passed: true,
    }
}

pub fn run_classify(
    op: &KreinOperator,
    label: Option<String>,
    opts: &RunOptions,
) -> Result<Report> {
    let sd = compute_spectrum(op)?;
    Ok(base_report("classify", op, &sd, label, opts))
}

pub fn run_predict(op: &KreinOperator, label: Option<String>, opts: &RunOptions) -> Result<Report> {
    let sd = compute_spectrum(op)?;
    let w = predict_w(op, &sd, opts.strict)?;
    let wco = predict_wco(op, &sd, opts.strict)?;
    let mut report = base_report("predict", op, &sd, label, opts);
    report.predicted_w = Some(RealSetOut::new(&w));
    report.predicted_wco = Some(RealSetOut::new(&wco));
    Ok(report)
}

pub fn run_sample(op: &KreinOperator, label: Option<String>, opts: &RunOptions) -> Result<Report> {
    let sd = compute_spectrum(op)?;
    let w = predict_w(op, &sd, opts.strict)?;
    let wco = predict_wco(op, &sd, opts.strict)?;
    let w_report = sample_range(op, &sd, RangeKind::W, opts.samples, opts.seed)?;
    let wco_report = sample_range(op, &sd, RangeKind::Wco, opts.samples, opts.seed)?;
    let mut report = base_report("sample", op, &sd, label, opts);
    report.predicted_w = Some(RealSetOut::new(&w));
    report.predicted_wco = Some(RealSetOut::new(&wco));
    report.violations_total = w_report.violations.len() + wco_report.violations.len();
    report.passed = report.violations_total == 0;
    report.sampling_w = Some(SamplingOut::new(opts.samples, &w_report));
    report.sampling_wco = Some(SamplingOut::new(opts.samples, &wco_report));
    Ok(report)
}

/// Endpoint checks implied by the predicted sets: the inner endpoints of
/// the two unbounded pieces of `W` and the outer endpoints of `W_co`.
fn endpoint_checks(w: &RealSet, wco: &RealSet) -> Vec<(RangeKind, EndpointSide, f64)> {
    let mut checks = Vec::new();
    for (value, side) in w.finite_edges() {
        match side {
            crate::realset::EdgeSide::Lower if value >= 0.0 => {
                checks.push((RangeKind::W, EndpointSide::PosMin, value));
            }
            crate::realset::EdgeSide::Upper if value <= 0.0 => {
                checks.push((RangeKind::W, EndpointSide::NegMax, value));
            }
            _ => {}
        }
    }
    if let (Some(first), Some(last)) = (wco.intervals().first(), wco.intervals().last()) {
        if first.lo.0.is_finite() {
            checks.push((RangeKind::Wco, EndpointSide::Min, first.lo.0));
        }
        if last.hi.0.is_finite() {
            checks.push((RangeKind::Wco, EndpointSide::Max, last.hi.0));
        }
    }
    checks.sort_by(|a, b| a.2.total_cmp(&b.2));
    checks.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1 && a.2 == b.2);
    checks
}

pub fn run_verify(op: &KreinOperator, label: Option<String>, opts: &RunOptions) -> Result<Report> {
    let sd = compute_spectrum(op)?;
    let w = predict_w(op, &sd, opts.strict)?;
    let wco = predict_wco(op, &sd, opts.strict)?;

    let w_samples = sample_range(op, &sd, RangeKind::W, opts.samples, opts.seed)?;
    let wco_samples = sample_range(op, &sd, RangeKind::Wco, opts.samples, opts.seed)?;

    let mut endpoints = Vec::new();
    for (which, side, predicted) in endpoint_checks(&w, &wco) {
        let estimated = estimate_endpoint(op, &sd, which, side)?;
        let error = (estimated - predicted).abs();
        endpoints.push(EndpointOut {
            which,
            side,
            predicted,
            estimated,
            error,
            within_tolerance: error <= ENDPOINT_TOL,
        });
    }

    let quotient = if sd.rank > 0 {
        let qm = build_quotient(op)?;
        let sigma_match = verify_sigma_match(op, &qm)?;
        let zero_resolvent = zero_resolvent_criterion(op, &qm);
        let (lo, hi, case) = wco_closure_endpoints(&qm, &sd);
        let closure_matches = wco
            .closure()
            .eq_approx(&RealSet::interval(lo, hi, true, true), CLOSURE_TOL);
        Some(QuotientReport {
            rank: qm.rank,
            sigma: qm.eigenvalues.clone(),
            sigma_match,
            zero_resolvent: zero_resolvent.into(),
            closure_lo: lo,
            closure_hi: hi,
            closure_case: case,
            closure_matches_prediction: closure_matches,
        })
    } else {
        None
    };

    let verdict = verify_spectral_inclusion(op, &sd)?;

    let violations_total = w_samples.violations.len() + wco_samples.violations.len();
    let endpoints_ok = endpoints.iter().all(|e| e.within_tolerance);
    let quotient_ok = quotient.as_ref().map_or(true, |q| {
        q.sigma_match.matched && q.zero_resolvent.agree && q.closure_matches_prediction
    });
    let passed = violations_total == 0
        && endpoints_ok
        && quotient_ok
        && verdict.holds
        && verdict.w_closure_holds;

    let mut report = base_report("verify", op, &sd, label, opts);
    report.predicted_w = Some(RealSetOut::new(&w));
    report.predicted_wco = Some(RealSetOut::new(&wco));
    report.quotient = quotient;
    report.inclusion = Some(InclusionReport::new(&verdict));
    report.sampling_w = Some(SamplingOut::new(opts.samples, &w_samples));
    report.sampling_wco = Some(SamplingOut::new(opts.samples, &wco_samples));
    report.endpoints = Some(endpoints);
    report.violations_total = violations_total;
    report.passed = passed;
    Ok(report)
}

/// Long-format plot data: one `kind,value` row per sampled value and per
/// predicted endpoint.
pub fn plot_data(report: &Report) -> Option<String> {
    let mut out = String::from("kind,value\n");
    let mut any = false;
    if let Some(w) = &report.sampling_w {
        if let (Some(min), Some(max)) = (w.min, w.max) {
            out.push_str(&format!("sample_w_min,{min}\nsample_w_max,{max}\n"));
        }
        any = true;
    }
    for (kind, set) in [("w", &report.predicted_w), ("wco", &report.predicted_wco)] {
        if let Some(set) = set {
            for iv in set.set.intervals() {
                if iv.lo.0.is_finite() {
                    out.push_str(&format!("{kind}_endpoint,{}\n", iv.lo.0));
                }
                if iv.hi.0.is_finite() {
                    out.push_str(&format!("{kind}_endpoint,{}\n", iv.hi.0));
                }
            }
            any = true;
        }
    }
    any.then_some(out)
}

/// Full sampled values for plot emission (kept out of reports to keep them
/// small).
pub fn plot_samples(op: &KreinOperator, opts: &RunOptions) -> Result<String> {
    let sd = compute_spectrum(op)?;
    let mut out = String::from("kind,value\n");
    for (kind, name) in [(RangeKind::W, "sample_w"), (RangeKind::Wco, "sample_wco")] {
        let rep = sample_range(op, &sd, kind, opts.samples, opts.seed)?;
        for v in rep.samples {
            out.push_str(&format!("{name},{v}\n"));
        }
        for iv in rep.predicted.intervals() {
            if iv.lo.0.is_finite() {
                out.push_str(&format!("{name}_endpoint,{}\n", iv.lo.0));
            }
            if iv.hi.0.is_finite() {
                out.push_str(&format!("{name}_endpoint,{}\n", iv.hi.0));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub trials: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub samples: usize,
    pub strict: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            trials: 500,
            dims: (2..=8).collect(),
            seed: 0,
            samples: 1_000,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteInstance {
    pub index: usize,
    pub dim: usize,
    pub kernel_class: SubspaceClass,
    pub range_class: SubspaceClass,
    pub seed: u64,
    pub passed: bool,
    pub degenerate_flag: bool,
    pub outside_theorem: bool,
    pub violations: usize,
    pub worst_endpoint_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub samples_per_instance: usize,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub degenerate_flagged: usize,
    pub outside_theorem_count: usize,
    pub total_violations: usize,
    pub worst_endpoint_error: f64,
    pub worst_sigma_gap: f64,
    pub failures: Vec<SuiteInstance>,
    pub instances: Vec<SuiteInstance>,
}

impl SuiteSummary {
    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 {
            0
        } else {
            3
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries always serialize")
    }
}

fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sweep achievable class combinations across the dimension list, running
/// the full verification pipeline on generated instances.
pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteSummary> {
    let dims = if opts.dims.is_empty() {
        vec![2]
    } else {
        opts.dims.clone()
    };
    let mut summary = SuiteSummary {
        tool: "kreinrange".into(),
        version: crate::VERSION.into(),
        seed: opts.seed,
        trials: opts.trials,
        dims: dims.clone(),
        samples_per_instance: opts.samples,
        total: 0,
        passed: 0,
        failed: 0,
        degenerate_flagged: 0,
        outside_theorem_count: 0,
        total_violations: 0,
        worst_endpoint_error: 0.0,
        worst_sigma_gap: 0.0,
        failures: Vec::new(),
        instances: Vec::new(),
    };
    for index in 0..opts.trials {
        let dim = dims[index % dims.len()];
        let combos = achievable_combos(dim);
        let (kernel, range) = combos[(index / dims.len()) % combos.len()];
        let instance_seed = mix_seed(opts.seed, index as u64);
        let op = generate_case(dim, kernel, range, instance_seed)?;
        let run = RunOptions {
            samples: opts.samples,
            seed: instance_seed,
            strict: opts.strict,
            tol: Tolerances::default(),
        };
        let report = run_verify(&op, None, &run)?;
        let worst_endpoint_error = report
            .endpoints
            .as_ref()
            .map(|es| es.iter().map(|e| e.error).fold(0.0, f64::max))
            .unwrap_or(0.0);
        let instance = SuiteInstance {
            index,
            dim,
            kernel_class: kernel,
            range_class: range,
            seed: instance_seed,
            passed: report.passed,
            degenerate_flag: report
                .inclusion
                .as_ref()
                .map_or(false, |i| i.degenerate_flag),
            outside_theorem: report.operator.outside_theorem,
            violations: report.violations_total,
            worst_endpoint_error,
        };
        summary.total += 1;
        if instance.passed {
            summary.passed += 1;
        } else {
            summary.failed += 1;
            summary.failures.push(instance.clone());
        }
        if instance.degenerate_flag {
            summary.degenerate_flagged += 1;
        }
        if instance.outside_theorem {
            summary.outside_theorem_count += 1;
        }
        summary.total_violations += instance.violations;
        summary.worst_endpoint_error = summary.worst_endpoint_error.max(worst_endpoint_error);
        if let Some(q) = &report.quotient {
            summary.worst_sigma_gap = summary.worst_sigma_gap.max(q.sigma_match.max_relative_gap);
        }
        summary.instances.push(instance);
    }
    Ok(summary)
}
