use std::process::Command;

use chyp_cli::config::SpecEntry;
use chyp_cli::{run_classify, run_verify, RunConfig, Specs};
use chyp_core::homdesc::sample::random_commuting;
use chyp_core::{HolonomySpec, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(args: &[&str], threads: Option<&str>) -> Vec<u8> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chyp"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("CHYP_THREADS", t),
        None => cmd.env_remove("CHYP_THREADS"),
    };
    let out = cmd.output().unwrap();
    assert!(out.status.code().unwrap() <= 1, "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn fixed_seed_is_byte_identical() {
    let args = ["verify", "--n", "4", "--seed", "17"];
    let a = run(&args, None);
    let b = run(&args, None);
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn thread_count_does_not_change_the_report() {
    let args = ["verify", "--n", "4", "--seed", "3"];
    let one = run(&args, Some("1"));
    assert_eq!(one, run(&args, Some("4")));
    assert_eq!(one, run(&args, Some("2")));
}

#[test]
fn seed_drives_the_randomized_checks() {
    let a = run(&["verify", "--n", "4", "--seed", "1"], None);
    let b = run(&["verify", "--n", "4", "--seed", "2"], None);
    assert_ne!(a, b);
}

#[test]
fn binary_matches_library() {
    let bin = run(&["verify", "--n", "3", "--seed", "5"], None);
    let mut cfg = RunConfig::new(3);
    cfg.seed = 5;
    let lib = run_verify(&cfg).unwrap().to_json();
    assert_eq!(String::from_utf8(bin).unwrap(), lib);

    let bin = run(&["classify", "--n", "2,4", "--kind", "k24"], None);
    let mut cfg = RunConfig::new(2);
    let entry = SpecEntry::special(chyp_core::SpecialKind::K24);
    cfg.specs = Specs::List(vec![entry.clone().with_n(2), entry.with_n(4)]);
    assert_eq!(String::from_utf8(bin).unwrap(), run_classify(&cfg).unwrap().to_json());
}

#[test]
fn records_are_sorted_by_key_not_input_order() {
    let spec = |r, s, v| SpecEntry::spec(&HolonomySpec::new(r, s, vec![], v));
    let forward = vec![
        SpecEntry::symmetric(),
        spec(0, 1, Variant::N2Image),
        spec(1, 0, Variant::N2Kernel).with_n(5),
        spec(0, 0, Variant::N2Kernel),
    ];
    let mut backward = forward.clone();
    backward.reverse();
    let mut cfg = RunConfig::new(4);
    cfg.specs = Specs::List(forward);
    let a = run_verify(&cfg).unwrap();
    cfg.specs = Specs::List(backward);
    let b = run_verify(&cfg).unwrap();
    assert_eq!(a.to_json().replace(' ', ""), b.to_json().replace(' ', ""));
    let keys: Vec<&str> = a.records.iter().map(|r| r.key.as_str()).collect();
    assert_eq!(keys, ["n=4 symmetric", "n=4 r=0 s=0 [] n2-kernel", "n=4 r=0 s=1 [] n2-image", "n=5 r=1 s=0 [] n2-kernel"]);
}

#[test]
fn explicit_shift_is_verified() {
    let spec = HolonomySpec::new(1, 0, vec![], Variant::N2Kernel);
    let d = random_commuting(&spec, 4, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
    let mut entry = SpecEntry::spec(&spec);
    entry.hr = Some(chyp_cli::config::matrix_to_json(&d));
    let mut cfg = RunConfig::new(4);
    cfg.specs = Specs::List(vec![entry]);
    let r = run_verify(&cfg).unwrap();
    assert!(r.passed(), "{}", r.to_json());
    let rec = &r.records[0];
    assert!(rec.key.ends_with("+H_r"));
    let hr = &rec.phi.as_ref().unwrap().hr;
    assert!(hr.iter().flatten().any(|z| z[0].abs() + z[1].abs() > 1e-6));
}
