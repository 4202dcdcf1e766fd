use swarmchem::eco::Condition;
use swarmchem_lab::sweep::{RunStatus, SUMMARY_FILE};
use swarmchem_lab::{sweep, InitSpec, RunConfig, RunManifest, SweepOptions};

fn small_base() -> RunConfig {
    RunConfig::from_toml("resolution = 80\n[world]\nside = 300.0\nparticles = 60\nrandom_active = 3\n").unwrap()
}

#[test]
fn four_conditions_three_seeds_one_init() {
    let tmp = tempfile::tempdir().unwrap();
    let mut opts = SweepOptions::new(Condition::ALL.to_vec(), vec![1, 2, 3], vec![InitSpec::Random], 40);
    opts.snap_every = 20;
    opts.base = small_base();
    let m = sweep(&opts, tmp.path()).unwrap();
    assert_eq!(m.runs.len(), 12);
    assert_eq!(m.completed(), 12);
    for r in &m.runs {
        let rm = RunManifest::load(&tmp.path().join(&r.dir)).unwrap();
        assert_eq!(rm.condition, r.condition);
        assert_eq!(rm.seed, r.seed);
        assert_eq!(rm.config.eco, r.condition.parse::<Condition>().unwrap().config());
    }
    let summary = std::fs::read_to_string(tmp.path().join(SUMMARY_FILE)).unwrap();
    assert_eq!(summary.lines().next().unwrap(), "condition,run_id,mean_exploration,mean_structuredness");
    assert_eq!(summary.lines().count(), 1 + 12);
    assert_eq!(m.window, (0, 40));
}

#[test]
fn failed_run_is_marked_and_others_complete() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = InitSpec::File(tmp.path().join("missing.txt"));
    let mut opts = SweepOptions::new(
        vec![Condition::RevisedLow],
        vec![7, 8],
        vec![InitSpec::Random, missing],
        20,
    );
    opts.snap_every = 10;
    opts.base = small_base();
    let m = sweep(&opts, tmp.path()).unwrap();
    assert_eq!(m.runs.len(), 4);
    assert_eq!(m.completed(), 2);
    for r in &m.runs {
        if r.init.starts_with("file:") {
            assert_eq!(r.status, RunStatus::Failed);
            assert!(r.error.as_deref().unwrap().contains("missing.txt"));
        } else {
            assert_eq!(r.status, RunStatus::Completed);
        }
    }
    let summary = std::fs::read_to_string(tmp.path().join(SUMMARY_FILE)).unwrap();
    assert_eq!(summary.lines().count() - 1, m.completed());
}

#[test]
fn explicit_window_is_used() {
    let tmp = tempfile::tempdir().unwrap();
    let mut opts = SweepOptions::new(vec![Condition::OriginalLow], vec![1], vec![InitSpec::Random], 40);
    opts.snap_every = 10;
    opts.base = small_base();
    opts.window = Some((20, 40));
    let m = sweep(&opts, tmp.path()).unwrap();
    assert_eq!(m.window, (20, 40));
    assert_eq!(m.completed(), 1);
}

#[test]
fn empty_axes_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let opts = SweepOptions::new(vec![], vec![1], vec![InitSpec::Random], 10);
    assert!(sweep(&opts, tmp.path()).is_err());
}

#[test]
fn cli_sweep_writes_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("base.toml");
    std::fs::write(&cfg, "resolution = 60\n[world]\nside = 200.0\nparticles = 40\nrandom_active = 2\n").unwrap();
    let res = std::process::Command::new(env!("CARGO_BIN_EXE_swarmchem"))
        .args(["sweep", "--conditions", "original-high,revised-high", "--seeds", "1,2", "--inits", "random,rotary"])
        .args(["--steps", "20", "--snap-every", "10", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(String::from_utf8_lossy(&res.stdout).contains("8 of 8 runs completed"));
    let summary = std::fs::read_to_string(tmp.path().join("out").join(SUMMARY_FILE)).unwrap();
    assert_eq!(summary.lines().count(), 9);
}
