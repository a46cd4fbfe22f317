//! Orchestration: expand the configured specs, evaluate each one (possibly in
//! parallel) and assemble a deterministic report.

use std::cmp::Ordering;

use chyp_core::classify::{cross_validate, cross_validate_perturbed, cross_validate_symmetric, k1_fault, Pattern};
use chyp_core::conngeo::{holonomy_equals_phi_n, parallel_fields_check, symmetric_checks};
use chyp_core::homdesc::sample::{random_unitary, FACTOR_POOL};
use chyp_core::homdesc::enumerate_admissible;
use chyp_core::ktensor::{alpha_form, build_s, project};
use chyp_core::linalg::realify_action;
use chyp_core::matlie::{bracket_table, exact::bracket_table_exact, su_basis};
use chyp_core::{
    construct_phi, special_phi_linear, validate_spec, ConnectionData, CrossValidation, Error, SpecialKind,
    Tolerances, Variant,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{matrix_to_json, Family, RunConfig, SpecEntry, SpecMarker, Specs};
use crate::error::{CliError, CliResult};
use crate::report::{
    BracketRelation, Check, ClassRecord, Command, ConfigEcho, DecompositionRecord, HolonomyRecord, OracleRecord,
    PhiEcho, Record, Report, TensorExport, TraceRecord, Validation,
};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "CHYP_THREADS";

/// Relative size of the injected `K1` fault.
const FAULT_SIZE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Full,
    ClassifyOnly,
}

/// The lambda and beta values of the special families in the default set.
pub fn special_families() -> Vec<SpecialKind> {
    let mut kinds = vec![SpecialKind::K24];
    kinds.extend([-1.0, 0.5, 2.0, 3.0].map(|lambda| SpecialKind::K234Lambda { lambda }));
    kinds.extend([0.0, 1.5].map(|beta| SpecialKind::K234Beta { beta }));
    kinds
}

/// Every admissible spec for `n` of the given variant (both when `None`).
pub fn sweep_entries(n: usize, variant: Option<Variant>, cap: usize) -> CliResult<Vec<SpecEntry>> {
    if n > cap {
        return Err(Error::SweepCap { n, cap }.into());
    }
    let variants = match variant {
        Some(v) => vec![v],
        None => vec![Variant::N2Kernel, Variant::N2Image],
    };
    Ok(variants
        .into_iter()
        .flat_map(|v| enumerate_admissible(n, v, &FACTOR_POOL))
        .map(|s| SpecEntry::spec(&s))
        .collect())
}

fn expand(cfg: &RunConfig) -> CliResult<Vec<SpecEntry>> {
    match &cfg.specs {
        Specs::List(list) => Ok(list.clone()),
        Specs::Marker(SpecMarker::Sweep) => sweep_entries(cfg.n, None, cfg.sweep_cap),
        Specs::Marker(SpecMarker::Default) => {
            let mut out = vec![SpecEntry::symmetric()];
            out.extend(special_families().into_iter().map(SpecEntry::special));
            out.extend(sweep_entries(cfg.n, None, cfg.sweep_cap)?);
            Ok(out)
        }
    }
}

/// A resolved entry, ready to evaluate.
struct Job {
    n: usize,
    mu: f64,
    entry: SpecEntry,
    family: Family,
}

impl Job {
    fn key(&self) -> String {
        match &self.family {
            Family::Symmetric => format!("n={} symmetric", self.n),
            Family::Special(k) => format!("n={} {}", self.n, special_name(k)),
            Family::Spec { spec, hr } => {
                format!("n={} {}{}", self.n, spec.label(), if hr.is_some() { " +H_r" } else { "" })
            }
        }
    }

    fn order(&self, o: &Job) -> Ordering {
        fn rank(f: &Family) -> u8 {
            match f {
                Family::Symmetric => 0,
                Family::Special(_) => 1,
                Family::Spec { .. } => 2,
            }
        }
        fn special_key(k: &SpecialKind) -> (u8, f64) {
            match *k {
                SpecialKind::K24 => (0, 0.0),
                SpecialKind::K234Lambda { lambda } => (1, lambda),
                SpecialKind::K234Beta { beta } => (2, beta),
            }
        }
        self.n
            .cmp(&o.n)
            .then(rank(&self.family).cmp(&rank(&o.family)))
            .then_with(|| match (&self.family, &o.family) {
                (Family::Special(a), Family::Special(b)) => {
                    let (ta, va) = special_key(a);
                    let (tb, vb) = special_key(b);
                    ta.cmp(&tb).then(va.total_cmp(&vb))
                }
                (Family::Spec { spec: a, hr: ha }, Family::Spec { spec: b, hr: hb }) => {
                    a.canonical().cmp(&b.canonical()).then(ha.is_some().cmp(&hb.is_some()))
                }
                _ => Ordering::Equal,
            })
            .then(self.mu.total_cmp(&o.mu))
    }
}

pub fn special_name(k: &SpecialKind) -> String {
    match k {
        SpecialKind::K24 => "K24".into(),
        SpecialKind::K234Lambda { lambda } => format!("K234_lambda({lambda})"),
        SpecialKind::K234Beta { beta } => format!("K234_beta({beta})"),
    }
}

fn jobs(cfg: &RunConfig, entries: Vec<SpecEntry>) -> CliResult<Vec<Job>> {
    let mut out = Vec::with_capacity(entries.len());
    for entry in entries {
        let n = entry.n.unwrap_or(cfg.n);
        if n < 2 {
            return Err(CliError::Usage(format!("n must be at least 2, got {n}")));
        }
        let mu = entry.mu.unwrap_or(cfg.mu);
        crate::config::check_mu(mu)?;
        let family = entry.family()?;
        out.push(Job { n, mu, entry, family });
    }
    // Stable: equal keys keep their configured order.
    out.sort_by(|a, b| a.order(b));
    Ok(out)
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let t: usize = v
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a thread count, got {v:?}")))?;
        b = b.num_threads(t);
    }
    b.build().map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))
}

/// Builds every connection first so that input errors (a rejected special
/// family, a shift that does not commute) abort the run before any work.
/// Inadmissible specs are kept: they become failing records.
fn prepare(cfg: &RunConfig, jobs: &[Job]) -> CliResult<Vec<Option<ConnectionData>>> {
    jobs.iter()
        .enumerate()
        .map(|(i, job)| {
            let phi = match &job.family {
                Family::Symmetric => return Ok(None),
                Family::Special(kind) => special_phi_linear(job.n, *kind, job.mu)?,
                Family::Spec { spec, hr } => {
                    if validate_spec(spec, job.n).is_err() {
                        return Ok(None);
                    }
                    let phi = construct_phi(spec, job.n, hr.as_ref(), job.mu)?;
                    if cfg.conjugate {
                        phi.conjugate(&random_unitary(job.n - 1, &mut job_rng(cfg.seed, i, 0)))?
                    } else {
                        phi
                    }
                }
            };
            Ok(Some(ConnectionData::new(phi)?))
        })
        .collect()
}

/// Independent random stream per record and purpose, so results do not
/// depend on scheduling.
fn job_rng(seed: u64, index: usize, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((index as u64) << 8) | purpose);
    rng
}

fn echo(cfg: &RunConfig, tol: &Tolerances) -> ConfigEcho {
    ConfigEcho {
        n: cfg.n,
        mu: cfg.mu,
        seed: cfg.seed,
        tolerances: *tol,
        conjugate: cfg.conjugate,
        frame_changes: cfg.frame_changes,
    }
}

fn evaluate_all(cfg: &RunConfig, jobs: &[Job], mode: Mode) -> CliResult<Vec<Record>> {
    let tol = cfg.tolerances()?;
    let conns = prepare(cfg, jobs)?;
    let pool = thread_pool()?;
    Ok(pool.install(|| {
        jobs.par_iter()
            .zip(conns.par_iter())
            .enumerate()
            .map(|(i, (job, conn))| evaluate(cfg, &tol, i, job, conn.as_ref(), mode))
            .collect()
    }))
}

fn evaluate(cfg: &RunConfig, tol: &Tolerances, index: usize, job: &Job, conn: Option<&ConnectionData>, mode: Mode) -> Record {
    let mut rec = Record {
        key: job.key(),
        n: job.n,
        mu: job.mu,
        spec: job.entry.clone(),
        validation: Validation { admissible: true, violation: None },
        phi: None,
        holonomy: None,
        oracle: None,
        trace_law: None,
        decomposition: None,
        classification: None,
        tensor: None,
        passed: false,
    };
    if let Family::Spec { spec, .. } = &job.family {
        if let Err(v) = validate_spec(spec, job.n) {
            rec.validation = Validation { admissible: false, violation: Some(v) };
            return rec;
        }
    }
    match conn {
        None => evaluate_symmetric(&mut rec, tol, job.n, mode),
        Some(conn) => evaluate_connection(&mut rec, cfg, tol, index, conn, mode),
    }
    rec.passed = record_passed(&rec);
    rec
}

fn record_passed(rec: &Record) -> bool {
    let mut ok = rec.validation.admissible;
    if let Some(h) = &rec.holonomy {
        ok &= h.span_equals_phi.passed;
    }
    if let Some(o) = &rec.oracle {
        ok &= o.check.passed && o.parallel_fields.map_or(true, |p| p.passed);
    }
    if let Some(t) = &rec.trace_law {
        ok &= t.check.passed && t.frame_independence.passed;
    }
    if let Some(d) = &rec.decomposition {
        ok &= d.sum.passed && d.orthogonality.passed && d.identities.passed;
    }
    if let Some(c) = &rec.classification {
        ok &= c.passed;
    }
    ok
}

fn evaluate_symmetric(rec: &mut Record, tol: &Tolerances, n: usize, mode: Mode) {
    if mode == Mode::Full {
        match symmetric_checks(n) {
            Ok(sym) => {
                rec.holonomy = Some(HolonomyRecord {
                    dim_k: sym.dim_k,
                    r: 0,
                    s: 0,
                    dim_ss: sym.dim_k - 1,
                    center_dim: 1,
                    dim_span: sym.span_rank,
                    dim_phi: sym.dim_k,
                    span_equals_phi: Check::below_and(sym.mm_in_k, tol.rank, sym.holonomy_is_full()),
                });
                rec.oracle = Some(OracleRecord {
                    residuals: None,
                    symmetric: Some(sym),
                    check: Check::below(sym.torsion_max, tol.oracle),
                    parallel_fields: None,
                });
            }
            Err(e) => rec.classification = Some(class_error(&rec.key, e)),
        }
    }
    if rec.classification.is_none() {
        rec.classification = Some(match cross_validate_symmetric(n, tol) {
            Ok(cv) => class_record(&rec.key, cv, None),
            Err(e) => class_error(&rec.key, e),
        });
    }
}

fn evaluate_connection(rec: &mut Record, cfg: &RunConfig, tol: &Tolerances, index: usize, conn: &ConnectionData, mode: Mode) {
    let n = conn.n();
    let phi = &conn.phi;
    rec.phi = Some(PhiEcho {
        a0: matrix_to_json(phi.phi_a0().matrix()),
        n2: matrix_to_json(phi.phi_n2().matrix()),
        hr: matrix_to_json(phi.hr().matrix()),
    });
    let s = build_s(conn);
    let scale = s.norm().max(1.0);

    if mode == Mode::Full {
        let sig = phi.signature(tol.rank);
        let cmp = holonomy_equals_phi_n(conn, tol.rank);
        rec.holonomy = Some(HolonomyRecord {
            dim_k: sig.dim_k,
            r: sig.r,
            s: sig.s,
            dim_ss: sig.dim_ss,
            center_dim: sig.center_dim,
            dim_span: cmp.dim_span,
            dim_phi: cmp.dim_phi,
            span_equals_phi: Check::below_and(cmp.span_in_phi.max(cmp.phi_in_span), tol.rank, cmp.equal),
        });

        let residuals = conn.oracle_residuals();
        let pf = parallel_fields_check(conn);
        rec.oracle = Some(OracleRecord {
            residuals: Some(residuals),
            symmetric: None,
            check: Check::below(residuals.max(), tol.oracle),
            parallel_fields: Some(Check::below(pf.max_a0.max(pf.max_n2), tol.oracle)),
        });

        let c12 = s.c12();
        let alpha = alpha_form(&conn.frame);
        let law = |coef: f64| (&c12 - &alpha * coef).amax() / scale;
        let coefficient = 2.0 * n as f64;
        let mut rng = job_rng(cfg.seed, index, 1);
        let mut frame = 0.0_f64;
        for _ in 0..cfg.frame_changes {
            let o = realify_action(&random_unitary(n, &mut rng));
            frame = frame.max((s.change_frame(&o).c12() - o.transpose() * &c12).amax() / scale);
        }
        rec.trace_law = Some(TraceRecord {
            coefficient,
            check: Check::below(law(coefficient), tol.oracle),
            stated_coefficient: 2.0 * coefficient,
            stated_residual: law(2.0 * coefficient),
            frame_independence: Check::below(frame, tol.oracle),
        });

        match project(&s) {
            Ok(dec) => {
                let r = dec.residuals;
                rec.decomposition = Some(DecompositionRecord {
                    norms: dec.norms(),
                    theta2: dec.theta2.clone(),
                    theta4: dec.theta4.clone(),
                    c12: dec.c12.clone(),
                    scale: dec.scale,
                    residuals: r,
                    sum: Check::below(r.reconstruction / dec.scale, tol.component),
                    orthogonality: Check::below(r.orthogonality / dec.scale, tol.component),
                    identities: Check::below(r.identities().max(r.l_squared) / dec.scale, tol.component),
                });
            }
            Err(e) => {
                rec.classification = Some(class_error(&rec.key, e));
                return;
            }
        }

        if cfg.export_tensor {
            let d = s.dim();
            rec.tensor = Some(TensorExport {
                shape: [d, d, d],
                frame: format!("n={n} mu={}: e_0..e_{} then J e_0..J e_{}; e_{} along A0, J e_{} along N2", conn.mu(), n - 1, n - 1, n - 1, n - 1),
                data: s.entries().to_vec(),
            });
        }
    }

    let cv = match cross_validate(conn, tol) {
        Ok(cv) => cv,
        Err(e) => {
            rec.classification = Some(class_error(&rec.key, e));
            return;
        }
    };
    let fault = if cv.label.pattern() == Pattern::General {
        None
    } else {
        let mut rng = job_rng(cfg.seed, index, 2);
        k1_fault(n, FAULT_SIZE * scale, &mut rng)
            .and_then(|noise| cross_validate_perturbed(conn, &noise, tol))
            .map(|p| !p.agree)
            .ok()
    };
    rec.classification = Some(class_record(&rec.key, cv, fault));
}

fn class_record(key: &str, cv: CrossValidation, fault_detected: Option<bool>) -> ClassRecord {
    let passed = cv.passed() && fault_detected != Some(false);
    let verdict = format!(
        "{key}: algebraic {} / numeric {} {:?} -> {}",
        cv.label,
        cv.support.pattern,
        cv.support.indices(),
        if passed { "agree" } else if cv.agree { "fault undetected" } else { "DISAGREE" }
    );
    ClassRecord {
        label: Some(cv.label),
        numeric_pattern: Some(cv.support.pattern),
        agree: cv.agree,
        evidence: Some(cv.evidence),
        support: Some(cv.support),
        fault_detected,
        error: None,
        passed,
        verdict,
    }
}

fn class_error(key: &str, e: Error) -> ClassRecord {
    ClassRecord {
        label: None,
        evidence: None,
        support: None,
        numeric_pattern: None,
        agree: false,
        fault_detected: None,
        verdict: format!("{key}: {e}"),
        error: Some(e.to_string()),
        passed: false,
    }
}

/// Bracket relations for every `n` in the run, exact and in floating point.
fn bracket_suite(ns: &[usize], tol: &Tolerances) -> CliResult<Vec<BracketRelation>> {
    let mut out = Vec::new();
    for &n in ns {
        let float = bracket_table(n)?;
        for ex in bracket_table_exact(n)? {
            let residual = match float.iter().find(|f| f.relation == ex.relation) {
                Some(f) => f.residual,
                None => su_basis(n)?.iter().map(|x| x.membership_residual()).fold(0.0, f64::max),
            };
            out.push(BracketRelation {
                n,
                relation: ex.relation.to_string(),
                exact: ex.holds,
                check: Check::below(residual, tol.oracle),
            });
        }
    }
    Ok(out)
}

/// Full verification of the configured specs.
pub fn run_verify(cfg: &RunConfig) -> CliResult<Report> {
    cfg.validate()?;
    let tol = cfg.tolerances()?;
    let jobs = jobs(cfg, expand(cfg)?)?;
    let mut ns: Vec<usize> = jobs.iter().map(|j| j.n).collect();
    ns.push(cfg.n);
    ns.sort_unstable();
    ns.dedup();
    let brackets = bracket_suite(&ns, &tol)?;
    let records = evaluate_all(cfg, &jobs, Mode::Full)?;
    Ok(Report::new(Command::Verify, echo(cfg, &tol), brackets, records))
}

/// Every admissible spec for `cfg.n`, fully verified, with label counts.
/// `cfg.specs` is ignored.
pub fn run_sweep(cfg: &RunConfig, variant: Option<Variant>) -> CliResult<Report> {
    cfg.validate()?;
    let tol = cfg.tolerances()?;
    let jobs = jobs(cfg, sweep_entries(cfg.n, variant, cfg.sweep_cap)?)?;
    let records = evaluate_all(cfg, &jobs, Mode::Full)?;
    Ok(Report::new(Command::Sweep, echo(cfg, &tol), Vec::new(), records).with_label_counts())
}

/// Algebraic and numeric labels of the configured specs. A special family
/// outside its parameter range is an input error.
pub fn run_classify(cfg: &RunConfig) -> CliResult<Report> {
    cfg.validate()?;
    let tol = cfg.tolerances()?;
    let jobs = jobs(cfg, expand(cfg)?)?;
    let records = evaluate_all(cfg, &jobs, Mode::ClassifyOnly)?;
    Ok(Report::new(Command::Classify, echo(cfg, &tol), Vec::new(), records).with_label_counts())
}
