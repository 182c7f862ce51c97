mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use common::*;
use pointdata::analysis::fspl_1m;
use pointdata::io::{parse_point_table, parse_pooled_table, FormatDialect};
use pointdata::model::Column;
use pointdata::reference;

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn validate_clean_fixture() {
    let dir = fixture_dir();
    let run = pointdata(&["validate", "nyu"], dir.path());
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout, "");
}

#[test]
fn validate_reports_info_findings_but_exits_clean() {
    let dir = fixture_dir();
    let run = pointdata(
        &["validate", "nyu.pointdata.csv", "usc.meta.csv"],
        dir.path(),
    );
    assert_eq!(run.code, 0);
    let lines = json_lines(&run.stdout);
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|f| f["severity"] == "Info"));
}

#[test]
fn validate_corrupted_header_is_a_parse_error() {
    let dir = fixture_dir();
    let text = reference::NYU_POINTS_CSV.replacen("tr_sep_m", "distance", 1);
    fs::write(dir.path().join("nyu.pointdata.csv"), text).unwrap();
    let run = pointdata(&["validate", "nyu"], dir.path());
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("header mismatch"), "{}", run.stderr);
    assert!(run.stderr.contains("tr_sep_m"), "{}", run.stderr);
}

#[test]
fn validate_duplicate_pair_is_a_block() {
    let dir = fixture_dir();
    let mut text = reference::NYU_POINTS_CSV.to_string();
    let last = text.lines().last().unwrap().to_string();
    text.push_str(&format!("{last}\n"));
    fs::write(dir.path().join("nyu.pointdata.csv"), text).unwrap();
    let run = pointdata(&["validate", "nyu"], dir.path());
    assert_eq!(run.code, 1);
    let lines = json_lines(&run.stdout);
    assert!(lines
        .iter()
        .any(|f| f["code"] == "DUP_PAIR" && f["severity"] == "Block"));
}

#[test]
fn validate_missing_files_and_bad_flags() {
    let dir = fixture_dir();
    assert_eq!(pointdata(&["validate", "nowhere"], dir.path()).code, 2);
    assert_eq!(pointdata(&["validate"], dir.path()).code, 2);
    assert_eq!(
        pointdata(&["validate", "--bogus", "nyu"], dir.path()).code,
        2
    );
    assert_eq!(pointdata(&["frobnicate"], dir.path()).code, 2);
    assert_eq!(pointdata(&["--help"], dir.path()).code, 0);
    fs::write(dir.path().join("nyu.meta.csv"), "not,metadata,at,all\n").unwrap();
    assert_eq!(pointdata(&["validate", "nyu"], dir.path()).code, 2);
}

#[test]
fn merge_fixtures() {
    let dir = fixture_dir();
    let run = pointdata(&["merge", "--out", "out", "nyu", "usc"], dir.path());
    assert_eq!(run.code, 0, "{}", run.stderr);
    let pooled = fs::read(dir.path().join("out/pooled.pointdata.csv")).unwrap();
    let rows = parse_pooled_table(&pooled, &FormatDialect::csv()).unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows.iter().filter(|(_, id)| id == "nyu-umi-142").count(), 6);

    let compat: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/compat.json")).unwrap()).unwrap();
    assert_eq!(compat["blocked"], false);
    let findings = compat["findings"].as_array().unwrap();
    assert!(findings
        .iter()
        .any(|f| f["code"] == "AS_DEF_MISMATCH" && f["severity"] == "Warn"));
    assert_eq!(json_lines(&run.stdout).len(), findings.len());
}

#[test]
fn merge_same_campaign_twice() {
    let dir = fixture_dir();
    let run = pointdata(&["merge", "--out", "out", "nyu", "nyu"], dir.path());
    assert_eq!(run.code, 1);
    assert!(json_lines(&run.stdout)
        .iter()
        .any(|f| f["code"] == "DUP_CAMPAIGN"));
    assert!(!dir.path().join("out/pooled.pointdata.csv").exists());

    let forced = pointdata(
        &["merge", "--force", "--out", "out", "nyu", "nyu"],
        dir.path(),
    );
    assert_eq!(forced.code, 0);
    let compat: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/compat.json")).unwrap()).unwrap();
    assert_eq!(compat["blocked"], true);
    assert!(compat["findings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f["code"] == "DUP_CAMPAIGN"));
}

#[test]
fn merge_needs_two_campaigns_and_honours_tolerance() {
    let dir = fixture_dir();
    assert_eq!(pointdata(&["merge", "nyu"], dir.path()).code, 2);
    let run = pointdata(
        &[
            "merge",
            "--freq-rel-tol",
            "0.01",
            "--out",
            "o",
            "nyu",
            "usc",
        ],
        dir.path(),
    );
    assert_eq!(run.code, 1);
    assert!(run.stdout.contains("FREQ_OUT_OF_TOLERANCE"));
    assert_eq!(
        pointdata(&["merge", "--freq-rel-tol", "2", "nyu", "usc"], dir.path()).code,
        2
    );
}

#[test]
fn merge_json_dialect_output() {
    let dir = fixture_dir();
    let run = pointdata(
        &[
            "merge",
            "--dialect",
            "json",
            "--out",
            "o",
            "nyu.meta.csv",
            "usc.meta.csv",
        ],
        dir.path(),
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let bytes = fs::read(dir.path().join("o/pooled.pointdata.json")).unwrap();
    assert_eq!(
        parse_pooled_table(&bytes, &FormatDialect::json())
            .unwrap()
            .len(),
        12
    );
}

fn grid_search(rows: &[(f64, f64, f64)]) -> (f64, f64) {
    let rms = |n: f64| {
        let ss: f64 = rows
            .iter()
            .map(|&(d, pl, f)| (pl - fspl_1m(f).unwrap() - 10.0 * n * d.log10()).powi(2))
            .sum();
        (ss / rows.len() as f64).sqrt()
    };
    (0..=30_000)
        .map(|i| 1.0 + i as f64 * 1e-4)
        .map(|n| (n, rms(n)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

#[test]
fn fit_ci_both_splits() {
    let dir = fixture_dir();
    let run = pointdata(
        &[
            "fit",
            "--model",
            "ci",
            "--split",
            "both",
            "--out",
            "o",
            "--figures",
            "nyu",
            "usc",
        ],
        dir.path(),
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let fits = json_lines(&run.stdout);
    assert_eq!(fits.len(), 2);

    let points = reference::fixture_points();
    for (fit, los) in fits.iter().zip([true, false]) {
        assert_eq!(fit["model"], "CI");
        assert_eq!(fit["split"], if los { "LOS" } else { "NLOS" });
        let rows: Vec<(f64, f64, f64)> = points
            .iter()
            .filter(|p| (p.loc_condition == pointdata::model::LocCondition::Los) == los)
            .map(|p| {
                (
                    p.get_f64(Column::TrSepM).unwrap(),
                    p.get_f64(Column::PlDb).unwrap(),
                    p.get_f64(Column::FreqGhz).unwrap(),
                )
            })
            .collect();
        let (n, sigma) = grid_search(&rows);
        assert!((fit["ple"].as_f64().unwrap() - n).abs() <= 1e-3);
        assert!((fit["sigma_db"].as_f64().unwrap() - sigma).abs() <= 1e-3);
        assert_eq!(fit["n_points"], 6);
    }

    let scatter = fs::read_to_string(dir.path().join("o/scatter.csv")).unwrap();
    assert_eq!(scatter.lines().count(), 13);
    assert!(scatter
        .starts_with("tr_sep_m,pl_db,freq_ghz,campaign_id,loc\n24.43,102.6,142,nyu-umi-142,LOS\n"));
    let svg = fs::read_to_string(dir.path().join("o/fit_ci.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("nyu-umi-142 LOS"));
}

#[test]
fn fit_free_space_point() {
    let dir = tempfile::tempdir().unwrap();
    let pl = fspl_1m(142.0).unwrap() + 20.0;
    let row = format!("142,TX1,RX1,LOS,10,{pl:.10},0,0,0,0,0,0,0,0,0,0\n");
    let header = reference::NYU_POINTS_CSV
        .lines()
        .take(2)
        .collect::<Vec<_>>()
        .join("\n");
    fs::write(
        dir.path().join("fs.pointdata.csv"),
        format!("{header}\n{row}"),
    )
    .unwrap();
    fs::write(
        dir.path().join("fs.meta.csv"),
        "env,UMi\nfc,142 GHz (center)\n",
    )
    .unwrap();
    let run = pointdata(&["fit", "--split", "los", "--out", "o", "fs"], dir.path());
    assert_eq!(run.code, 0, "{}", run.stderr);
    let fit = &json_lines(&run.stdout)[0];
    assert!((fit["ple"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(fit["sigma_db"].as_f64().unwrap() < 1e-9);

    let nlos = pointdata(&["fit", "--split", "both", "--out", "o", "fs"], dir.path());
    assert_eq!(nlos.code, 1);
    let lines = json_lines(&nlos.stdout);
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["error"], "EmptyInput");
    assert!((lines[0]["ple"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn fit_abg_single_frequency_is_rank_deficient() {
    let dir = fixture_dir();
    let run = pointdata(
        &[
            "fit", "--model", "abg", "--split", "los", "--out", "o", "nyu",
        ],
        dir.path(),
    );
    assert_eq!(run.code, 1);
    assert_eq!(json_lines(&run.stdout)[0]["error"], "RankDeficient");
    let pooled = pointdata(
        &[
            "fit", "--model", "abg", "--split", "all", "--out", "o", "nyu", "usc",
        ],
        dir.path(),
    );
    assert_eq!(pooled.code, 0, "{}", pooled.stderr);
    assert_eq!(
        pointdata(&["fit", "--model", "fi", "nyu"], dir.path()).code,
        2
    );
}

#[test]
fn stats_nlos_delay_spread() {
    let dir = fixture_dir();
    let run = pointdata(
        &[
            "stats",
            "--column",
            "omni_ds_ns",
            "--split",
            "nlos",
            "--out",
            "o",
            "--figures",
            "nyu",
            "usc",
        ],
        dir.path(),
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = &json_lines(&run.stdout)[0];
    let values: Vec<f64> = reference::fixture_points()
        .iter()
        .filter(|p| p.loc_condition == pointdata::model::LocCondition::Nlos)
        .map(|p| p.get_f64(Column::OmniDsNs).unwrap())
        .collect();
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mu = logs.iter().sum::<f64>() / logs.len() as f64;
    let sigma = (logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / logs.len() as f64).sqrt();
    let ln = &doc["lognormal"];
    assert!((ln["mu_ln"].as_f64().unwrap() - mu).abs() <= 1e-9 * mu.abs());
    assert!((ln["sigma_ln"].as_f64().unwrap() - sigma).abs() <= 1e-9 * sigma);
    assert!(dir.path().join("o/cdf_omni_ds_ns_nlos.csv").is_file());
    assert!(dir.path().join("o/cdf_omni_ds_ns_nlos.svg").is_file());
    assert!(dir.path().join("o/stats_omni_ds_ns_nlos.json").is_file());
}

#[test]
fn stats_los_cdf_has_six_steps() {
    let dir = fixture_dir();
    let run = pointdata(
        &[
            "stats",
            "--column",
            "omni_ds_ns",
            "--split",
            "los",
            "--out",
            "o",
            "nyu",
            "usc",
        ],
        dir.path(),
    );
    assert_eq!(run.code, 0);
    let cdf = fs::read_to_string(dir.path().join("o/cdf_omni_ds_ns_los.csv")).unwrap();
    let lines: Vec<&str> = cdf.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], "value,probability");
    assert!(lines[6].ends_with(",1"));
}

#[test]
fn stats_unknown_column_lists_valid_ones() {
    let dir = fixture_dir();
    let run = pointdata(&["stats", "--column", "rms_ds", "nyu"], dir.path());
    assert_eq!(run.code, 2);
    assert!(
        run.stderr.contains("omni_ds_ns") && run.stderr.contains("pl_db"),
        "{}",
        run.stderr
    );
}

#[test]
fn stats_zero_values_omit_lognormal() {
    let dir = fixture_dir();
    let text = reference::NYU_POINTS_CSV.replacen(",3.3\n", ",0\n", 1);
    fs::write(dir.path().join("nyu.pointdata.csv"), text).unwrap();
    let run = pointdata(
        &["stats", "--column", "omni_zsd_deg", "--out", "o", "nyu"],
        dir.path(),
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = &json_lines(&run.stdout)[0];
    assert!(doc["lognormal"].is_null());
    assert_eq!(doc["lognormal_omitted"], "NonPositiveSample");
    assert!(dir.path().join("o/cdf_omni_zsd_deg_both.csv").is_file());
}

fn derive_setup(dir: &Path, as_def: Option<&str>) {
    fs::create_dir_all(dir.join("profiles")).unwrap();
    fs::write(dir.join("profiles/TX1_RX2.json"), TWO_BEAM_SCENE).unwrap();
    fs::write(
        dir.join("profiles/TX1_RX3.json"),
        r#"{"delays_ns": [100], "powers_dbm": [-48.6], "noise_floor_dbm": -120, "azimuth_deg": 40, "zenith_deg": 90}"#,
    )
    .unwrap();
    fs::write(
        dir.join("profiles/TX1_RX4.json"),
        r#"{"delays_ns": [0, 5], "powers_dbm": [null, null], "noise_floor_dbm": -120, "azimuth_deg": 0, "zenith_deg": 90}"#,
    )
    .unwrap();
    fs::write(dir.join("site.meta.csv"), derive_meta(as_def)).unwrap();
    fs::write(
        dir.join("geometry.csv"),
        "tx,rx,loc,tr_sep_m\nTX1,RX2,NLOS,40.5\nTX1,RX3,LOS,24.43\nTX1,RX4,NLOS,60\n",
    )
    .unwrap();
}

#[test]
fn derive_two_beam_scene() {
    let dir = tempfile::tempdir().unwrap();
    derive_setup(dir.path(), Some("3GPP TR 38.901"));
    let run = pointdata(
        &[
            "derive",
            "--profiles",
            "profiles",
            "--meta",
            "site.meta.csv",
            "--geometry",
            "geometry.csv",
            "--out",
            "o",
        ],
        dir.path(),
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stderr.contains("TX1_RX4"), "{}", run.stderr);
    let summary = &json_lines(&run.stdout)[0];
    assert_eq!(summary["rows"], 2);
    assert_eq!(summary["skipped"][0]["reason"], "EmptyAfterThreshold");

    let rows = parse_point_table(
        &fs::read(dir.path().join("o/derived.pointdata.csv")).unwrap(),
        &FormatDialect::csv(),
    )
    .unwrap();
    let [pl, omni_ds, mean_ds, asa] = two_beam_oracle();
    let p = &rows[0];
    for (column, expected) in [
        (Column::PlDb, pl),
        (Column::OmniDsNs, omni_ds),
        (Column::MeanDirDsNs, mean_ds),
        (Column::OmniAsaDeg, asa),
    ] {
        assert!(
            (p.get_f64(column).unwrap() - expected).abs() <= 0.5e-4 + 1e-12,
            "{column}"
        );
    }

    let single = &rows[1];
    assert_eq!(single.get_f64(Column::PlDb), Some(102.6));
    for column in Column::numeric().skip(3) {
        assert_eq!(single.get_f64(column), Some(0.0), "{column}");
    }
}

#[test]
fn derive_without_as_def_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    derive_setup(dir.path(), None);
    let run = pointdata(
        &[
            "derive",
            "--profiles",
            "profiles",
            "--meta",
            "site.meta.csv",
            "--geometry",
            "geometry.csv",
            "--out",
            "o",
        ],
        dir.path(),
    );
    assert_eq!(run.code, 2);
    assert!(
        run.stderr.contains("MissingRequired") && run.stderr.contains("as_def"),
        "{}",
        run.stderr
    );
}

#[test]
fn outputs_are_deterministic_and_inputs_untouched() {
    let dir = fixture_dir();
    let before = snapshot(dir.path());
    for out in ["a", "b"] {
        for args in [
            vec!["merge", "--out", out, "nyu", "usc"],
            vec!["fit", "--out", out, "--figures", "nyu", "usc"],
            vec![
                "fit", "--model", "abg", "--split", "all", "--out", out, "nyu", "usc",
            ],
            vec![
                "stats",
                "--column",
                "omni_ds_ns",
                "--out",
                out,
                "nyu",
                "usc",
            ],
        ] {
            assert_eq!(pointdata(&args, dir.path()).code, 0);
        }
    }
    assert_eq!(snapshot(dir.path()), before);
    let (a, b) = (
        snapshot(&dir.path().join("a")),
        snapshot(&dir.path().join("b")),
    );
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    for (name, bytes) in &a {
        if !name.ends_with(".svg") {
            assert_eq!(bytes, &b[name], "{name}");
        }
    }
}

#[test]
fn config_file_supplies_defaults() {
    let dir = fixture_dir();
    fs::write(
        dir.path().join("run.json"),
        r#"{"inputs": ["nyu", "usc"], "out": "from_config", "figures": true}"#,
    )
    .unwrap();
    let run = pointdata(&["fit", "--config", "run.json"], dir.path());
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(dir.path().join("from_config/fit_ci.svg").is_file());

    let run = pointdata(
        &["fit", "--config", "run.json", "--out", "flag", "nyu"],
        dir.path(),
    );
    assert_eq!(run.code, 0);
    assert_eq!(json_lines(&run.stdout)[0]["n_points"], 3);
    assert!(dir.path().join("flag/fit_ci.json").is_file());

    fs::write(
        dir.path().join("bad.json"),
        r#"{"inputs": ["nyu"], "colour": 1}"#,
    )
    .unwrap();
    assert_eq!(
        pointdata(&["fit", "--config", "bad.json"], dir.path()).code,
        2
    );
}

#[test]
fn lenient_mode_accepts_unknown_metadata_keys() {
    let dir = fixture_dir();
    let meta = format!("{}site_note,rooftop\n", reference::NYU_META_CSV);
    fs::write(dir.path().join("nyu.meta.csv"), meta).unwrap();
    assert_eq!(pointdata(&["validate", "nyu"], dir.path()).code, 2);
    let run = pointdata(&["validate", "--lenient", "nyu"], dir.path());
    assert_eq!(run.code, 0);
    assert!(json_lines(&run.stdout)
        .iter()
        .any(|f| f["code"] == "UNKNOWN_KEY"));
}
