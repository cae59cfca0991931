use tempfile::TempDir;
use vrlab::experiments::{read_report, run_experiment, write_report, ExperimentConfig, Params, ReportFormat};
use vrlab::Error;

#[test]
fn gaussian_tails_with_seed_seven() {
    let params = Params { n: Some(64), big_n: Some(128), samples: Some(100_000), ..Params::default() };
    let r = run_experiment(&ExperimentConfig::new("gaussian-tails", 7).with_params(params)).unwrap();
    assert!(r.pass);
    assert_eq!(r.criterion("upper_tail_count").unwrap().observed, 0.0);
    let bound = r.reference_curves["upper_tail_bound"];
    assert!((bound - (-32f64).exp()).abs() <= 1e-12 * bound);
}

#[test]
fn projection_lemma_in_dimension_four() {
    let params = Params { dims: Some(vec![4]), k: Some(2), trials: Some(1000), ..Params::default() };
    let r = run_experiment(&ExperimentConfig::new("projection-volume-lemma", 1).with_params(params)).unwrap();
    assert!(r.pass);
    let ratios = r.column("ratio").unwrap();
    assert_eq!(ratios.len(), 1000);
    assert!(ratios.iter().all(|x| (0.5..=2.0).contains(x)));
    let limit = 1.0 / (2.0 * 2.0);
    assert!(r.column("distance").unwrap().iter().all(|&d| d <= limit));
}

#[test]
fn unknown_experiment_is_an_error() {
    assert!(matches!(run_experiment(&ExperimentConfig::new("nope", 0)), Err(Error::UnknownExperiment(_))));
}

#[test]
fn reports_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let params = Params { trials: Some(17), ..Params::default() };
    let config = ExperimentConfig::new("absconv-bound", 4).with_params(params);
    let r = run_experiment(&config).unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    write_report(&r, ReportFormat::Json, &json).unwrap();
    write_report(&r, ReportFormat::Csv, &csv).unwrap();
    assert_eq!(read_report(&json).unwrap(), r);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 17 + 1);

    let again = run_experiment(&config).unwrap();
    let json2 = dir.path().join("r2.json");
    write_report(&again, ReportFormat::Json, &json2).unwrap();
    assert_eq!(std::fs::read(&json).unwrap(), std::fs::read(&json2).unwrap());

    let missing = dir.path().join("no/such/dir/r.json");
    match write_report(&r, ReportFormat::Json, &missing) {
        Err(e @ Error::Io { .. }) => assert!(e.to_string().contains("no/such/dir")),
        other => panic!("expected an I/O error, got {other:?}"),
    }
}

#[test]
fn reference_curves_come_from_the_formulas() {
    let params = Params { pairs: Some(2), restarts: Some(2), n: Some(6), k: Some(2), ..Params::default() };
    let r = run_experiment(&ExperimentConfig::new("main-theorem", 0).with_params(params)).unwrap();
    assert_eq!(r.reference_curves["main_bound"], vrlab::ratio::main_bound(6, 2).unwrap());
    assert_eq!(r.reference_curves["N"], 12.0);
}
