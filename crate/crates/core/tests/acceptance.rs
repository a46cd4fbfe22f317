//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line to stderr
//! (bypassing output capture) and then asserts its verdict.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::OnceLock;

use chyp_core::classify::{cross_validate, cross_validate_perturbed, cross_validate_symmetric, k1_fault};
use chyp_core::conngeo::{
    ambrose_singer, holonomy_equals_phi_n, holonomy_span, module_action_checks, parallel_fields_check,
    symmetric_checks, OracleResiduals,
};
use chyp_core::homdesc::sample::{random_commuting, random_phi, random_unitary, FACTOR_POOL};
use chyp_core::homdesc::{enumerate_admissible, Origin};
use chyp_core::ktensor::{alpha_form, build_s, build_s_oracle, e_split, project};
use chyp_core::linalg::{realify_action, RVec, RANK_TOL};
use chyp_core::matlie::{bracket_table, exact::bracket_table_exact};
use chyp_core::{
    construct_phi, special_phi_linear, ConnectionData, HolonomySpec, KTensor, SpecialKind, Tolerances, Variant,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SPECS_PER_N: usize = 50;
const NS: std::ops::RangeInclusive<usize> = 2..=6;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {id:>2} {verdict} {name}: {detail}");
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

struct Record {
    n: usize,
    conn: ConnectionData,
    s: KTensor,
}

/// Randomized admissible descriptions, `SPECS_PER_N` per `n`, most with a shift.
fn corpus() -> &'static [Record] {
    static CORPUS: OnceLock<Vec<Record>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut out = Vec::new();
        for n in NS {
            for i in 0..SPECS_PER_N {
                let phi = random_phi(n, &mut rng, i % 5 != 0).expect("admissible spec");
                let conn = ConnectionData::new(phi).expect("valid connection");
                let s = build_s(&conn);
                out.push(Record { n, conn, s });
            }
        }
        out
    })
}

/// Every admissible spec for `n = 2..6`, built without conjugation.
fn enumerated() -> Vec<(usize, HolonomySpec)> {
    let mut out = Vec::new();
    for n in NS {
        for v in [Variant::N2Kernel, Variant::N2Image] {
            out.extend(enumerate_admissible(n, v, &FACTOR_POOL).into_iter().map(|s| (n, s)));
        }
    }
    out
}

#[test]
fn criterion_01_bracket_tables() {
    let mut worst = 0.0_f64;
    let mut exact_ok = true;
    for n in NS {
        worst = bracket_table(n).unwrap().iter().map(|r| r.residual).fold(worst, f64::max);
        exact_ok &= bracket_table_exact(n).unwrap().iter().all(|c| c.holds);
    }
    report(
        1,
        "bracket tables",
        exact_ok && worst < 1e-14,
        &format!("exact relations hold: {exact_ok}; max float residual {worst:.2e} (< 1e-14)"),
    );
}

#[test]
fn criterion_02_holonomy_span() {
    let recs = corpus();
    let mut failures = 0;
    let mut with_shift = 0;
    let mut worst = 0.0_f64;
    for r in recs {
        let cmp = holonomy_equals_phi_n(&r.conn, RANK_TOL);
        worst = worst.max(cmp.span_in_phi).max(cmp.phi_in_span);
        failures += usize::from(!cmp.equal);
        with_shift += usize::from(!r.conn.phi.hr().is_zero(RANK_TOL));
    }
    report(
        2,
        "holonomy span equals phi(n)",
        failures == 0 && with_shift > 0,
        &format!(
            "{} specs ({SPECS_PER_N} per n, {with_shift} with H_r != 0), {failures} mismatches, max containment distance {worst:.2e}",
            recs.len()
        ),
    );
}

#[test]
fn criterion_03_curvature_torsion_oracles() {
    let mut worst = OracleResiduals::default();
    for r in corpus() {
        let o = r.conn.oracle_residuals();
        worst.bracket_m = worst.bracket_m.max(o.bracket_m);
        worst.curvature_element = worst.curvature_element.max(o.curvature_element);
        worst.curvature_action = worst.curvature_action.max(o.curvature_action);
        worst.torsion = worst.torsion.max(o.torsion);
        worst.h_membership = worst.h_membership.max(o.h_membership);
    }
    report(
        3,
        "curvature and torsion closed forms",
        worst.max() < 1e-11,
        &format!(
            "max residuals: curvature {:.2e}, curvature action {:.2e}, torsion {:.2e}, bracket {:.2e} (< 1e-11)",
            worst.curvature_element, worst.curvature_action, worst.torsion, worst.bracket_m
        ),
    );
}

#[test]
fn criterion_04_parallel_fields() {
    let (mut a0, mut n2, mut gram) = (0.0_f64, 0.0_f64, f64::INFINITY);
    for r in corpus() {
        let p = parallel_fields_check(&r.conn);
        a0 = a0.max(p.max_a0);
        n2 = n2.max(p.max_n2);
        gram = gram.min(p.gram_det);
    }
    report(
        4,
        "parallel fields A0 and N2",
        a0 < 1e-12 && n2 < 1e-12 && gram > 0.0,
        &format!("max |R A0| {a0:.2e}, max |R N2| {n2:.2e} (< 1e-12); min Gram determinant {gram:.3}"),
    );
}

#[test]
fn criterion_05_dual_route_tensor() {
    let mut worst = 0.0_f64;
    for r in corpus() {
        let o = build_s_oracle(&r.conn);
        worst = worst.max((&r.s - &o).max_abs() / r.s.norm().max(1.0));
    }
    report(5, "structure tensor vs bracket oracle", worst < 1e-11, &format!("max relative residual {worst:.2e} (< 1e-11)"));
}

#[test]
fn criterion_06_trace_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut stated = 0.0_f64;
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi = 0.0_f64;
    let mut frame = 0.0_f64;
    for r in corpus() {
        let c12 = r.s.c12();
        let alpha = alpha_form(&r.conn.frame);
        let want = &alpha * (4.0 * r.n as f64);
        stated = stated.max((&c12 - &want).amax());
        let a = r.conn.frame.a0_index();
        let per_n = c12[a] / alpha[a] / r.n as f64;
        ratio_lo = ratio_lo.min(per_n);
        ratio_hi = ratio_hi.max(per_n);
        for _ in 0..20 {
            let o = realify_action(&random_unitary(r.n, &mut rng));
            let moved = r.s.change_frame(&o).c12();
            frame = frame.max((moved - o.transpose() * &c12).amax());
        }
    }
    report(
        6,
        "trace law c12(S) = 4n alpha",
        stated < 1e-10 && frame < 1e-11,
        &format!(
            "max |c12 - 4n alpha| {stated:.3e} (< 1e-10); observed c12 / (n alpha) in [{ratio_lo:.12}, {ratio_hi:.12}]; frame independence {frame:.2e} (< 1e-11)"
        ),
    );
}

#[test]
fn criterion_07_decomposition() {
    let (mut sum, mut orth, mut ident, mut l2) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let (mut e1_theta, mut e1_rest, mut e_trace, mut e2_k1) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut theta_ratio = Vec::new();
    for r in corpus() {
        let dec = project(&r.s).unwrap();
        let res = dec.residuals;
        sum = sum.max(res.reconstruction / dec.scale);
        orth = orth.max(res.orthogonality / dec.scale);
        ident = ident.max(res.identities() / dec.scale);
        l2 = l2.max(res.l_squared / dec.scale);

        let [e1, e2, e3, e4] = e_split(&r.conn);
        let d1 = project(&e1).unwrap();
        let stated = alpha_form(&r.conn.frame);
        let (t2, t4) = (RVec::from_vec(d1.theta2.clone()), RVec::from_vec(d1.theta4.clone()));
        e1_theta = e1_theta.max((&t2 - &stated).amax()).max((&t4 - &stated).amax());
        let a = r.conn.frame.a0_index();
        theta_ratio.push(t2[a] / stated[a]);
        e1_rest = e1_rest.max(d1.s1.norm()).max(d1.s3.norm());
        for t in [&e2, &e3, &e4] {
            e_trace = e_trace.max(t.c12().amax());
        }
        e2_k1 = e2_k1.max(project(&e2).unwrap().s1.norm());
    }
    let lo = theta_ratio.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = theta_ratio.iter().copied().fold(0.0, f64::max);
    let pass = sum < 1e-10 && orth < 1e-9 && ident < 1e-9 && l2 < 1e-10 && e1_theta < 1e-10 && e1_rest < 1e-10
        && e_trace < 1e-10 && e2_k1 < 1e-9;
    report(
        7,
        "decomposition soundness and E-split",
        pass,
        &format!(
            "sum {sum:.2e}, orthogonality {orth:.2e}, identities {ident:.2e}, L^2 {l2:.2e}; \
             E1 theta vs g(A0,.)/mu {e1_theta:.3e} (observed ratio in [{lo:.12}, {hi:.12}]), \
             E1 K1+K3 part {e1_rest:.2e}; c12(E2,E3,E4) {e_trace:.2e}; E2 K1 part {e2_k1:.2e}"
        ),
    );
}

#[test]
fn criterion_08_ambrose_singer() {
    let (mut g, mut j, mut rr, mut t, mut s) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut gens = 0;
    for r in corpus() {
        let a = ambrose_singer(&r.conn);
        g = g.max(a.metric);
        j = j.max(a.complex);
        rr = rr.max(a.curvature);
        t = t.max(a.torsion);
        gens += a.generators;
        for h in holonomy_span(&r.conn, RANK_TOL) {
            s = s.max(r.s.derivation_residual(&r.conn.h_action_matrix(&h)));
        }
    }
    let worst = g.max(j).max(rr).max(t).max(s);
    report(
        8,
        "Ambrose-Singer at the point",
        worst < 1e-10,
        &format!("{gens} generators; g {g:.2e}, J {j:.2e}, R {rr:.2e}, T {t:.2e}, S {s:.2e} (< 1e-10)"),
    );
}

#[test]
fn criterion_09_classification() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut total = 0;
    let mut disagreements = Vec::new();
    let mut forbidden = 0;
    let mut check = |cv: chyp_core::CrossValidation, what: String| {
        total += 1;
        forbidden += usize::from(cv.support.forbidden);
        if !cv.agree {
            disagreements.push(format!("{what}: {} vs {:?}", cv.label, cv.support.indices()));
        }
    };

    let mut faults_injected = 0;
    let mut faults_detected = 0;
    for n in NS {
        check(cross_validate_symmetric(n, &tol).unwrap(), format!("symmetric n={n}"));
        let mut kinds = vec![SpecialKind::K24];
        kinds.extend([-1.0, 0.5, 2.0, 3.0].map(|lambda| SpecialKind::K234Lambda { lambda }));
        kinds.extend([0.0, 1.5].map(|beta| SpecialKind::K234Beta { beta }));
        for kind in kinds {
            let conn = ConnectionData::new(special_phi_linear(n, kind, 2.0).unwrap()).unwrap();
            check(cross_validate(&conn, &tol).unwrap(), format!("{kind:?} n={n}"));
            let noise = k1_fault(n, 1e-3 * build_s(&conn).norm(), &mut rng).unwrap();
            faults_injected += 1;
            faults_detected += usize::from(!cross_validate_perturbed(&conn, &noise, &tol).unwrap().agree);
        }
    }

    let mut generic = 0;
    for (n, spec) in enumerated() {
        if spec.dim_ss() == 0 && spec.r == 0 {
            continue;
        }
        for _ in 0..3 {
            let d = random_commuting(&spec, n, &mut rng).unwrap();
            let phi = construct_phi(&spec, n, Some(&d), 2.0)
                .or_else(|_| construct_phi(&spec, n, None, 2.0))
                .unwrap()
                .conjugate(&random_unitary(n - 1, &mut rng))
                .unwrap();
            let conn = ConnectionData::new(phi).unwrap();
            check(cross_validate(&conn, &tol).unwrap(), format!("{} n={n}", spec.label()));
            generic += 1;
        }
    }
    for r in corpus() {
        check(cross_validate(&r.conn, &tol).unwrap(), format!("random n={}", r.n));
    }

    let pass = disagreements.is_empty() && forbidden == 0 && generic >= 30 && faults_detected == faults_injected;
    report(
        9,
        "classification concordance",
        pass,
        &format!(
            "{total} descriptions ({generic} generic with k_ss != 0 or r >= 1), {} disagreements, {forbidden} with support {{1,2,4}}; faults detected {faults_detected}/{faults_injected}{}",
            disagreements.len(),
            disagreements.first().map(|d| format!("; first: {d}")).unwrap_or_default()
        ),
    );
}

/// Multisets over `pool` with total dimension at most `budget`.
fn brute_force(n: usize) -> (BTreeSet<HolonomySpec>, usize) {
    let mut out = BTreeSet::new();
    let mut boundary = 0;
    let big = 2 * n;
    for r in 0..=big {
        for s in 0..=big {
            for a2 in 0..=big {
                for a3 in 0..=big {
                    let dss = 3 * a2 + 8 * a3;
                    let lhs = 6 * r + 4 * s + 2 * dss;
                    let mut factors = vec![3; a3];
                    factors.extend(vec![2; a2]);
                    if lhs + 2 <= 2 * n {
                        boundary += usize::from(lhs + 2 == 2 * n);
                        out.insert(HolonomySpec::new(r, s, factors.clone(), Variant::N2Kernel).canonical());
                    }
                    if s >= 1 && lhs <= 2 * n {
                        boundary += usize::from(lhs == 2 * n);
                        out.insert(HolonomySpec::new(r, s, factors, Variant::N2Image).canonical());
                    }
                }
            }
        }
    }
    (out, boundary)
}

#[test]
fn criterion_10_sweep_enumeration() {
    let mut mismatched = Vec::new();
    let mut total = 0;
    let mut boundary = 0;
    for n in NS {
        let mut got: BTreeSet<HolonomySpec> = BTreeSet::new();
        for v in [Variant::N2Kernel, Variant::N2Image] {
            got.extend(enumerate_admissible(n, v, &FACTOR_POOL).into_iter().map(|s| s.canonical()));
        }
        let (want, b) = brute_force(n);
        boundary += b;
        total += want.len();
        if got != want {
            mismatched.push(n);
        }
    }
    report(
        10,
        "admissible spec enumeration",
        mismatched.is_empty() && boundary > 0,
        &format!("{total} specs over n = 2..6, {boundary} on the boundary; mismatching n: {mismatched:?}"),
    );
}

#[test]
fn criterion_11_module_lemmas() {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let (mut v0, mut k0, mut inter) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut needed = 0;
    let mut full_rank = 0;
    let mut locations = BTreeSet::new();
    let mut conns: Vec<ConnectionData> = enumerated()
        .into_iter()
        .map(|(n, spec)| {
            let phi = construct_phi(&spec, n, None, 2.0).unwrap();
            ConnectionData::new(phi.conjugate(&random_unitary(n - 1, &mut rng)).unwrap()).unwrap()
        })
        .collect();
    conns.extend(corpus().iter().map(|r| r.conn.clone()));
    for conn in &conns {
        let rep = module_action_checks(conn).unwrap();
        v0 = v0.max(rep.trivial_on_v0);
        k0 = k0.max(rep.center_on_vss.unwrap_or(0.0));
        let Origin::Spec(spec) = &conn.phi.origin else { continue };
        if spec.dim_ss() > 0 {
            needed += 1;
            if let Some(t) = &rep.intertwiner {
                inter = inter.max(t.residual).max(t.w_in_kernel).max(t.w_overlap_vk);
                full_rank += usize::from(t.rank == t.dim);
                locations.insert(t.w_coordinates.len());
            }
        }
    }
    let pass = v0 < 1e-11 && k0 < 1e-11 && inter < 1e-11 && full_rank == needed;
    report(
        11,
        "module action lemmas",
        pass,
        &format!(
            "{} descriptions; trivial on V0+JV0+n2+a {v0:.2e}, k0 on Vss+JVss {k0:.2e}; full-rank intertwiners {full_rank}/{needed}, residual {inter:.2e}",
            conns.len()
        ),
    );
}

#[test]
fn criterion_12_symmetric_description() {
    let mut ok = true;
    let mut torsion = 0.0_f64;
    let mut ranks = Vec::new();
    for n in NS {
        let r = symmetric_checks(n).unwrap();
        torsion = torsion.max(r.torsion_max);
        ok &= r.holonomy_is_full() && r.mm_in_k < 1e-12;
        ranks.push(format!("{}/{}", r.span_rank, r.dim_k));
    }
    report(
        12,
        "symmetric description",
        ok && torsion < 1e-12,
        &format!("max torsion {torsion:.2e}; span [m,m] rank / dim k: {}", ranks.join(", ")),
    );
}
