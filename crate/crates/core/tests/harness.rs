use gpbandit::harness::config::{KernelKind, NoiseChoice, ObjectiveChoice};
use gpbandit::harness::experiment::{noise_seed, objective_seed, run_experiment};
use gpbandit::harness::report::{
    aggregate, export_csv, parse_csv_file, read_csv, render_svg_string, write_csv,
};
use gpbandit::{Error, ExperimentConfig, Policy};

const SMALL: &str = "
kernel = se
lengthscale = 0.2
objective = rkhs
noise = gaussian
budget = 12
trials = 3
base_seed = 4
delta = 0.05
algorithms = MVR,GPEI
";

#[test]
fn config_parses_with_defaults() {
    let cfg = ExperimentConfig::parse(SMALL).unwrap();
    assert_eq!(cfg.kernel, KernelKind::Se);
    assert_eq!(cfg.objective, ObjectiveChoice::Rkhs);
    assert_eq!(cfg.noise, NoiseChoice::Gaussian);
    assert_eq!(cfg.grid_size, 100);
    assert_eq!(cfg.grid_seed, 4);
    assert_eq!(cfg.algorithms, vec![Policy::Mvr, Policy::GpEi]);
    assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
}

#[test]
fn config_errors_carry_line_numbers() {
    let bad = SMALL.replace("delta = 0.05", "delta = 0.05\ncolour = red");
    assert!(matches!(
        ExperimentConfig::parse(&bad),
        Err(Error::Config { line: 10, .. })
    ));
    let dup = format!("{SMALL}budget = 3\n");
    assert!(matches!(
        ExperimentConfig::parse(&dup),
        Err(Error::Config { .. })
    ));
    let matern = SMALL.replace("kernel = se", "kernel = matern");
    assert!(ExperimentConfig::parse(&matern).is_err());
    assert!(ExperimentConfig::parse(&SMALL.replace("delta = 0.05", "delta = 1.5")).is_err());
    assert!(ExperimentConfig::parse(&SMALL.replace("MVR,GPEI", "MVR,TS")).is_err());
    assert!(ExperimentConfig::parse(&SMALL.replace("budget = 12", "")).is_err());
}

#[test]
fn seeds_follow_documented_rule() {
    let cfg = ExperimentConfig::parse(SMALL).unwrap();
    assert_eq!(objective_seed(&cfg, 2), 6);
    assert_eq!(noise_seed(&cfg, 2, Policy::GpEi), 4 + 2 * 1_000_000 + 3);
}

#[test]
fn experiment_records_are_complete() {
    let cfg = ExperimentConfig::parse(SMALL).unwrap();
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.records.len(), 3 * 2 * 12);
    for r in &out.records {
        assert!(r.simple_regret >= 0.0);
        assert!(r.n >= 1 && r.n <= 12);
        assert!(r.selected_index < 100 && r.recommendation_index < 100);
        let trial = &out.trials[r.trial];
        let expected =
            trial.objective.max_value() - trial.objective.value_at(r.recommendation_index).unwrap();
        assert_eq!(r.simple_regret, expected);
    }
    // experiments with a subset of algorithms see the same objectives
    let mut only_mvr = cfg.clone();
    only_mvr.algorithms = vec![Policy::Mvr];
    let sub = run_experiment(&only_mvr).unwrap();
    let from_full: Vec<_> = out
        .records
        .iter()
        .filter(|r| r.algorithm == "MVR")
        .cloned()
        .collect();
    assert_eq!(sub.records, from_full);
}

#[test]
fn csv_round_trip_is_exact() {
    let cfg = ExperimentConfig::parse(SMALL).unwrap();
    let out = run_experiment(&cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&out.records, &mut buf).unwrap();
    assert_eq!(read_csv(buf.as_slice()).unwrap(), out.records);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.csv");
    export_csv(&out.records, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), buf);
    assert_eq!(parse_csv_file(&path).unwrap(), out.records);
}

#[test]
fn svg_is_well_formed() {
    let cfg = ExperimentConfig::parse(SMALL).unwrap();
    let out = run_experiment(&cfg).unwrap();
    let curves = aggregate(&out.records);
    assert_eq!(curves.len(), 2);
    assert!(curves
        .values()
        .all(|c| c.len() == 12 && c.iter().all(|p| p.trials == 3)));
    let svg = render_svg_string(&curves);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    let polylines = doc
        .descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .count();
    assert_eq!(polylines, 2);
    let labels: Vec<&str> = doc.descendants().filter_map(|n| n.text()).collect();
    assert!(labels.contains(&"MVR") && labels.contains(&"GPEI"));
    // an empty input still renders a valid document
    roxmltree::Document::parse(&render_svg_string(&Default::default())).unwrap();
}
