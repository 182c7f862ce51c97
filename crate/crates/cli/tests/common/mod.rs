#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pointdata::reference;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn pointdata(args: &[&str], cwd: &Path) -> Run {
    let Output {
        status,
        stdout,
        stderr,
    } = Command::new(env!("CARGO_BIN_EXE_pointdata"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs");
    Run {
        code: status.code().expect("exited normally"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

/// Writes both bundled campaigns as `nyu.*` and `usc.*` into `dir`.
pub fn write_fixtures(dir: &Path) {
    fs::write(dir.join("nyu.pointdata.csv"), reference::NYU_POINTS_CSV).unwrap();
    fs::write(dir.join("nyu.meta.csv"), reference::NYU_META_CSV).unwrap();
    fs::write(dir.join("usc.pointdata.csv"), reference::USC_POINTS_CSV).unwrap();
    fs::write(dir.join("usc.meta.csv"), reference::USC_META_CSV).unwrap();
}

pub fn fixture_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    dir
}

pub fn json_lines(text: &str) -> Vec<serde_json::Value> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

pub fn out_dir(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// Metadata sufficient for derivation, with an optional `as_def` line.
pub fn derive_meta(as_def: Option<&str>) -> String {
    let mut text = String::from(
        "env,UMi\nfc,142 GHz (center)\nptx_avg,0 dBm\ng_tx,27 dBi\ng_rx,27 dBi\nt_pdp,25 dB below peak\n",
    );
    if let Some(def) = as_def {
        text.push_str(&format!("as_def,{def}\n"));
    }
    text
}

pub const TWO_BEAM_SCENE: &str = r#"[
  {"delays_ns": [0, 10, 20], "powers_dbm": [-60, -70, null], "noise_floor_dbm": -120,
   "azimuth_deg": 10, "zenith_deg": 90},
  {"delays_ns": [0, 10, 20], "powers_dbm": [null, -65, -72], "noise_floor_dbm": -120,
   "azimuth_deg": 40, "zenith_deg": 90}
]"#;

/// Independent computation of the two-beam scene: PL, omni DS, mean
/// directional DS and the 3GPP azimuth spread.
pub fn two_beam_oracle() -> [f64; 4] {
    let mw = |dbm: f64| 10f64.powf(dbm / 10.0);
    let delays = [0.0, 10.0, 20.0];
    let a = [mw(-60.0), mw(-70.0), 0.0];
    let b = [0.0, mw(-65.0), mw(-72.0)];
    let ds = |p: &[f64]| {
        let total: f64 = p.iter().sum();
        let m1: f64 = p.iter().zip(delays).map(|(p, t)| p * t).sum::<f64>() / total;
        let m2: f64 = p.iter().zip(delays).map(|(p, t)| p * t * t).sum::<f64>() / total;
        (m2 - m1 * m1).sqrt()
    };
    let omni: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let (pa, pb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    let total = pa + pb;
    let (fa, fb) = (10f64.to_radians(), 40f64.to_radians());
    let re = (pa * fa.cos() + pb * fb.cos()) / total;
    let im = (pa * fa.sin() + pb * fb.sin()) / total;
    [
        54.0 - 10.0 * total.log10(),
        ds(&omni),
        (pa * ds(&a) + pb * ds(&b)) / total,
        (-2.0 * (re * re + im * im).sqrt().ln()).sqrt().to_degrees(),
    ]
}
