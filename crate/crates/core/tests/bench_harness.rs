use mgas_core::bench::{
    eta_sweep, operating_characteristics, run_class, run_function, write_benchmark, BenchParams,
    RunRecord,
};
use mgas_core::gkls::{generate, GklsClassSpec};
use mgas_core::parallel::Execution;
use mgas_core::run::{Algorithm, StopReason};

fn small() -> BenchParams {
    BenchParams::default().with_max_trials(3000)
}

#[test]
fn report_has_one_entry_per_function() {
    let spec = GklsClassSpec::preset(1).unwrap();
    let rep = run_class(Algorithm::Mgas, &spec, 10, &small()).unwrap();
    assert_eq!(rep.runs.len(), 10);
    let charged: Vec<u64> = rep
        .runs
        .iter()
        .map(|r| if r.solved { r.trials } else { 3000 })
        .collect();
    let mean = charged.iter().sum::<u64>() as f64 / 10.0;
    assert!((rep.average - mean).abs() < 1e-9);
    assert_eq!(rep.maximum, *charged.iter().max().unwrap());
}

#[test]
fn recorded_trials_match_the_trace() {
    let spec = GklsClassSpec::preset(2).unwrap();
    let params = small();
    let rep = run_class(Algorithm::Mgas, &spec, 5, &params).unwrap();
    for rec in &rep.runs {
        let r = run_function(Algorithm::Mgas, &spec, rec.func_index, &params).unwrap();
        assert_eq!(rec.trials, r.trace.len() as u64);
        assert_eq!(rec.stop_reason, r.stop_reason);
    }
}

#[test]
fn execution_modes_agree() {
    let spec = GklsClassSpec::preset(1).unwrap().with_seed(3);
    let seq = run_class(
        Algorithm::Direct,
        &spec,
        8,
        &small().with_execution(Execution::Sequential),
    )
    .unwrap();
    let par = run_class(
        Algorithm::Direct,
        &spec,
        8,
        &small().with_execution(Execution::Parallel),
    )
    .unwrap();
    let strip = |rs: &[RunRecord]| {
        rs.iter()
            .map(|r| (r.func_index, r.trials, r.stop_reason))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&seq.runs), strip(&par.runs));
}

#[test]
fn immediate_hit_counts_three_trials() {
    // m = 1 puts the minimizer at the paraboloid vertex; a huge radius makes
    // the first three curve samples hit
    let mut spec = GklsClassSpec::preset(1).unwrap();
    spec.num_minima = 1;
    let params = BenchParams {
        radius: Some(10.0),
        ..small()
    };
    let rep = run_class(Algorithm::Mgas, &spec, 1, &params).unwrap();
    assert!(rep.runs[0].solved);
    assert_eq!(rep.runs[0].trials, 3);
    let _ = generate(&spec, 0).unwrap();
}

#[test]
fn characteristics_are_monotone_and_bounded() {
    let spec = GklsClassSpec::preset(2).unwrap();
    let reps = [
        run_class(Algorithm::Mgas, &spec, 10, &small()).unwrap(),
        run_class(Algorithm::Direct, &spec, 10, &small()).unwrap(),
    ];
    let rows = operating_characteristics(&reps, &[100, 1000, 10_000]);
    assert_eq!(rows.len(), 6);
    for series in rows.chunks(3) {
        assert!(series
            .windows(2)
            .all(|w| w[0].solved_count <= w[1].solved_count));
        assert!(series.iter().all(|r| r.solved_count <= 10));
    }
}

#[test]
fn oversized_eta_stagnates() {
    let spec = GklsClassSpec::preset(1).unwrap();
    let rows = eta_sweep(&spec, &[0.1, 1e-4, 1e-6], 10, &small()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].stagnated >= 1);
    assert_eq!(rows[0].eta, 0.1);
}

#[test]
fn persisted_outputs_are_deterministic() {
    let spec = GklsClassSpec::preset(1).unwrap().with_seed(4);
    let write = || {
        let dir = tempfile::tempdir().unwrap();
        let reps = [
            run_class(Algorithm::Mgas, &spec, 4, &small()).unwrap(),
            run_class(Algorithm::Direct, &spec, 4, &small()).unwrap(),
        ];
        write_benchmark(dir.path(), &reps, &[10, 100, 1000]).unwrap();
        let runs = std::fs::read(dir.path().join("runs.csv")).unwrap();
        let oc = std::fs::read(dir.path().join("characteristics.csv")).unwrap();
        let one = std::fs::read(dir.path().join("runs/class1_mgas_f000.json")).unwrap();
        (runs, oc, one)
    };
    let (a, b) = (write(), write());
    assert_eq!(a, b);
    let header = String::from_utf8(a.0).unwrap();
    assert!(header.starts_with("class,func_index,algo,solved,trials,stop_reason\n"));
    assert!(String::from_utf8(a.1)
        .unwrap()
        .starts_with("budget,solved_count,algo,class\n"));
    let rec: RunRecord = serde_json::from_slice(&a.2).unwrap();
    assert_eq!(rec.schema_version, 1);
    assert!(matches!(
        rec.stop_reason,
        StopReason::Solved | StopReason::Budget | StopReason::Stagnation
    ));
}
