use super::*;

fn euclidean_suite() -> ExperimentConfig {
    builtin_suites().remove(0)
}

#[test]
fn toml_round_trip_and_defaults() {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
        name = "pmt"
        scenario = "pmt_stability"
        s0 = 1.0
        mode = "ode"
        [family]
        ambient = "schwarzschild"
        schedule = "mass"
        base = 0.1
        members = 5
        [tolerances]
        area = 1e-9
        "#,
    )
    .unwrap();
    assert_eq!(cfg.family.members, 5);
    assert_eq!(cfg.n_theta, 16);
    assert_eq!(cfg.tolerances().area, 1e-9);
    assert_eq!(cfg.tolerances().lemma22, 1e-6);
    let params: Vec<f64> = cfg.members().unwrap().iter().map(|m| m.parameter).collect();
    assert_eq!(params, vec![0.05, 0.025, 0.0125, 0.00625, 0.003125]);
    assert!(cfg.members().unwrap().iter().all(|m| m.mass == m.parameter));
    let back = ExperimentConfig::from_toml_str(&toml::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn config_errors() {
    let err = |s: &str| matches!(ExperimentConfig::from_toml_str(s), Err(Error::Config(_)));
    assert!(err("scenario = \"nope\""));
    assert!(err("unknown_key = 1"));
    assert!(err(
        "scenario = \"pmt_stability\"\n[family]\nambient = \"schwarzschild\"\nschedule = \"mass\"\nbase = 0.1\nmembers = 2"
    ));
    assert!(err("scenario = \"pmt_stability\"\n[family]\nambient = \"schwarzschild\"\nbase = 0.1\nmembers = 4"));
    assert!(err("[family]\nambient = \"euclidean\"\nschedule = \"mass\"\nbase = 0.1"));
    // 2m = 0.98 leaves less than the chart margin at s0 = 1
    assert!(err("[family]\nambient = \"schwarzschild\"\nmass = 0.49"));
    assert!(err("mode = \"ode\"\n[family]\nambient = \"perturbed_schwarzschild\"\namplitude = 0.01"));
    assert!(!err("[family]\nambient = \"schwarzschild\"\nmass = 0.4"));
}

#[test]
fn surface_schedule_builds_perturbed_members() {
    let cfg = ExperimentConfig {
        scenario: ScenarioKind::RpiStability,
        mode: FlowMode::Pde,
        family: FamilyConfig {
            ambient: FamilyAmbient::Schwarzschild,
            schedule: Schedule::SurfaceAmplitude,
            base: 0.1,
            members: 3,
            mass: 0.1,
            ..FamilyConfig::default()
        },
        ..ExperimentConfig::default()
    };
    let m = cfg.members().unwrap();
    assert_eq!(m.len(), 3);
    assert!(m.iter().all(|m| m.mass == 0.1));
    assert!(matches!(m[1].flow.initial, InitialSurface::Perturbed { amplitude, .. } if amplitude == 0.025));
    assert_eq!(cfg.chain_scenario(0.0), Scenario::Rpi);
}

#[test]
fn trend_verdicts_need_strict_decrease() {
    assert!(TrendVerdict::new("x", vec![3.0, 2.0, 1.0]).passed());
    assert!(!TrendVerdict::new("x", vec![3.0, 3.0, 1.0]).passed());
    assert!(!TrendVerdict::new("x", vec![3.0, f64::NAN, 1.0]).passed());
    assert!(!TrendVerdict::new("x", vec![1.0]).passed());
    assert_eq!(TrendVerdict::new("x", vec![4.0, 2.0, 1.0]).ratio, 0.25);
}

#[test]
fn run_without_diagnostics_is_reported_failed() {
    let cfg = euclidean_suite();
    let member = &cfg.members().unwrap()[0];
    let mut s = run::RunSummary::blank(member);
    s.finish();
    assert!(!s.passed);
    let text = emit_report("empty", &[s], &[]);
    assert!(text.contains("FAIL") && text.contains("no checks ran") && text.ends_with("verdict FAIL\n"));
}

#[test]
fn summary_rows_plus_one_trend_row() {
    let cfg = euclidean_suite();
    let member = &cfg.members().unwrap()[0];
    let rows: Vec<RunSummary> = (1..=5)
        .map(|i| {
            let mut s = run::RunSummary::blank(member);
            s.member = i;
            s.d_hat_g_target = 1.0 / i as f64;
            s.h_concentration_mid = 1.0;
            s
        })
        .collect();
    let trends = trend_verdicts(ScenarioKind::RpiStability, &rows);
    let t = summary_table(&rows, &trends).unwrap();
    assert_eq!(t.rows.len(), 6);
    assert_eq!(t.headers[0], "schema_version");
    let last = t.rows.last().unwrap();
    assert_eq!(last[t.column("member").unwrap()], "trend");
    assert_eq!(last[t.column("passed").unwrap()], "false");
    assert_eq!(last[t.column("failed_checks").unwrap()], "h_concentration_mid");
    assert!(t.rows.iter().all(|r| r.len() == t.headers.len()));
}

#[test]
fn euclidean_identity_suite_passes_deterministically() {
    let cfg = euclidean_suite();
    let a = run_experiment(&cfg).unwrap();
    assert!(a.passed(), "{}", a.report());
    let s = &a.summaries[0];
    assert!(s.checks.iter().any(|c| c.name == "chain_exact"));
    assert!(s.d_hat_g_target <= 1e-10);
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.tables[0].to_csv().unwrap(), b.tables[0].to_csv().unwrap());
    let t = &a.tables[0];
    assert_eq!(t.rows.len(), 51);
    for col in ["schema_version", "t", "m_h", "slack_statement", "slack_proof", "roundness_deficit", "p_hat_g_target"] {
        assert!(t.column(col).is_some(), "{col}");
    }
    assert!(a.report().ends_with("verdict PASS\n"));
}

#[test]
fn outputs_are_written() {
    let dir = std::env::temp_dir().join(format!("imcf-experiment-{}", std::process::id()));
    let mut cfg = euclidean_suite();
    cfg.t_final = 0.2;
    let out = run_experiment(&cfg).unwrap();
    let files = write_outputs(&dir, &out).unwrap();
    assert_eq!(files.len(), 3);
    let summary = std::fs::read_to_string(&files[1]).unwrap();
    assert!(summary.starts_with("schema_version,member,parameter"));
    assert_eq!(summary.lines().count(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn environment_overrides_output_dir() {
    let mut cfg = euclidean_suite();
    assert_eq!(cfg.output_dir_with(Some("/tmp/a".into())), Some(PathBuf::from("/tmp/a")));
    assert_eq!(cfg.output_dir_with(None), None);
    cfg.output_dir = Some("out".into());
    assert_eq!(cfg.output_dir_with(Some("".into())), Some(PathBuf::from("out")));
    assert_eq!(cfg.output_dir_with(Some("/tmp/b".into())), Some(PathBuf::from("/tmp/b")));
}

#[test]
fn shipped_configs_parse() {
    for text in [
        include_str!("../../../../configs/pmt_stability.toml"),
        include_str!("../../../../configs/rpi_stability.toml"),
        include_str!("../../../../configs/identity_euclidean.toml"),
    ] {
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert!(!cfg.members().unwrap().is_empty());
    }
}
