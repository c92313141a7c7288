// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;

use proptest::prelude::*;
use spatnet_core::io::{
    export_graph, export_variables, ingest, parse_edges, parse_nodes, read_graph,
};
use spatnet_core::report::{mask_timestamp, RegressionDocument};
use spatnet_core::{
    fixtures, ols_regress, run, validate_report, write_bundle, AnalysisConfig, Command, Error,
    ReportKind, SpatialGraph,
};

fn write_inputs(dir: &Path, seed: u64) -> AnalysisConfig {
    let g = fixtures::synthetic_gcn(seed);
    let vars = fixtures::synthetic_variables(&g, seed);
    let (mut n, mut e, mut v) = (Vec::new(), Vec::new(), Vec::new());
    export_graph(&g, &mut n, &mut e).unwrap();
    export_variables(&vars, &mut v).unwrap();
    fs::write(dir.join("nodes.csv"), n).unwrap();
    fs::write(dir.join("edges.csv"), e).unwrap();
    fs::write(dir.join("variables.csv"), v).unwrap();
    let mut config = AnalysisConfig::new(dir.join("nodes.csv"), dir.join("edges.csv"));
    config.variables = Some(dir.join("variables.csv"));
    config.seed = Some(21);
    config.replicates = 5;
    config.epoch = Some("2010".into());
    config
}

#[test]
fn ingest_reports_shape() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_inputs(dir.path(), 0);
    let data = ingest(&config.nodes, &config.edges, config.variables.as_deref()).unwrap();
    assert_eq!(
        (
            data.summary.nodes,
            data.summary.edges,
            data.summary.components
        ),
        (39, 71, 1)
    );
    assert_eq!(data.summary.epochs, vec!["1988", "2010"]);
    assert_eq!(data.summary.variable_rows, Some(39));
}

#[test]
fn file_round_trip_preserves_the_graph() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_inputs(dir.path(), 5);
    let g = read_graph(&config.nodes, &config.edges).unwrap();
    assert_eq!(g, fixtures::synthetic_gcn(5));
    let (mut n, mut e) = (Vec::new(), Vec::new());
    export_graph(&g, &mut n, &mut e).unwrap();
    assert_eq!(n, fs::read(&config.nodes).unwrap());
    assert_eq!(e, fs::read(&config.edges).unwrap());
}

#[test]
fn all_writes_every_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = write_inputs(dir.path(), 1);
    config.out = dir.path().join("out");
    let bundle = run(Command::All, &config).unwrap();
    assert_eq!(bundle.kinds(), ReportKind::ALL.to_vec());
    let written = write_bundle(&bundle, &config.out).unwrap();
    assert_eq!(written.len(), 10);
    for kind in ReportKind::ALL {
        let text = fs::read_to_string(config.out.join(kind.file_name())).unwrap();
        validate_report(kind, &text).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["provenance"]["seed"], 21);
        assert_eq!(value["provenance"]["tool"], "spatnet");
    }
    let plot =
        fs::read_to_string(config.out.join("plotdata/degree_distribution_normal.csv")).unwrap();
    assert!(plot.starts_with("x,y,fitted_y\n"));
    let leftovers: Vec<_> = fs::read_dir(&config.out)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with('.'))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn runs_are_reproducible_apart_from_the_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_inputs(dir.path(), 2);
    let a = run(Command::All, &config).unwrap();
    let b = run(Command::All, &config).unwrap();
    for (path, text) in &a.files {
        let other = b.get(path).unwrap();
        if path.ends_with(".json") {
            assert_eq!(
                mask_timestamp(text).unwrap(),
                mask_timestamp(other).unwrap(),
                "{path}"
            );
        } else {
            assert_eq!(text, other, "{path}");
        }
    }
    let mut reseeded = config.clone();
    reseeded.seed = Some(22);
    let c = run(Command::Omega, &reseeded).unwrap();
    assert_ne!(
        mask_timestamp(a.report(ReportKind::Omega).unwrap()).unwrap(),
        mask_timestamp(c.report(ReportKind::Omega).unwrap()).unwrap()
    );
}

#[test]
fn regress_mirrors_the_library_model() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = write_inputs(dir.path(), 3);
    config.models = vec![vec!["S6".into(), "B6".into(), "O2".into()]];
    let bundle = run(Command::Regress, &config).unwrap();
    assert_eq!(bundle.kinds(), vec![ReportKind::Regression]);
    let doc: RegressionDocument =
        serde_json::from_str(bundle.report(ReportKind::Regression).unwrap()).unwrap();
    let table = fixtures::synthetic_variables(&fixtures::synthetic_gcn(3), 3);
    let direct = ols_regress(&table, &["S6", "B6", "O2"]).unwrap();
    assert_eq!(doc.models.len(), 1);
    let m = &doc.models[0];
    assert_eq!(m.predictors, direct.predictors);
    for (a, b) in m.coefficients.iter().zip(&direct.coefficients) {
        assert!((a.b - b.b).abs() <= 1e-12 * b.b.abs().max(1.0));
        assert!((a.beta.unwrap() - b.beta.unwrap()).abs() < 1e-12);
    }
    assert!((m.r_squared - direct.r_squared).abs() < 1e-12);
}

#[test]
fn failures_leave_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = write_inputs(dir.path(), 4);
    config.models = vec![vec!["S6".into(), "NOPE".into()]];
    config.out = dir.path().join("out");
    let err = run(Command::All, &config).unwrap_err();
    assert_eq!(err, Error::UnknownVariable("NOPE".into()));
    assert!(!config.out.exists());

    config.seed = None;
    assert!(matches!(
        run(Command::Omega, &config),
        Err(Error::Config(_))
    ));
    assert!(run(Command::Analyze, &config).is_ok());
}

#[test]
fn validation_rejects_unknown_and_missing_fields() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_inputs(dir.path(), 0);
    let bundle = run(Command::Communities, &config).unwrap();
    let text = bundle.report(ReportKind::Communities).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(text).unwrap();
    value["partition"]["extra"] = serde_json::json!(1);
    assert!(matches!(
        validate_report(ReportKind::Communities, &value.to_string()),
        Err(Error::InvalidReport(_))
    ));
    let mut value: serde_json::Value = serde_json::from_str(text).unwrap();
    value["provenance"].as_object_mut().unwrap().remove("seed");
    assert!(validate_report(ReportKind::Communities, &value.to_string()).is_err());
    assert!(validate_report(ReportKind::Measures, text).is_err());
}

#[test]
fn malformed_inputs_surface_as_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = write_inputs(dir.path(), 0);
    let edges = fs::read_to_string(&config.edges).unwrap();
    let mut lines: Vec<String> = edges.lines().map(str::to_string).collect();
    let fields: Vec<&str> = lines[5].split(',').collect();
    lines[5] = format!("{},{},-5,{}", fields[0], fields[1], fields[3..].join(","));
    fs::write(&config.edges, lines.join("\n")).unwrap();
    match run(Command::Analyze, &config).unwrap_err() {
        Error::NegativeWeight { line, value, .. } => assert_eq!((line, value), (6, -5.0)),
        other => panic!("{other:?}"),
    }
    fs::write(dir.path().join("vars.csv"), "id,pop:S\n1,3\n").unwrap();
    config.variables = Some(dir.path().join("vars.csv"));
    config.edges = dir.path().join("missing.csv");
    assert!(run(Command::Regress, &config).unwrap_err().is_schema());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn csv_round_trip_is_lossless(seed in any::<u64>()) {
        let g = fixtures::synthetic_gcn(seed);
        let (mut n, mut e) = (Vec::new(), Vec::new());
        export_graph(&g, &mut n, &mut e).unwrap();
        let back = SpatialGraph::build(parse_nodes(n.as_slice(), "n").unwrap(), parse_edges(e.as_slice(), "e").unwrap()).unwrap();
        prop_assert_eq!(back, g);
    }
}
