use std::time::Instant;

use pointdata::derivation::{
    angular_spread_3gpp, angular_spread_fleury, apply_threshold_pdp, derive_point, parse_profiles,
    rms_delay_spread, DerivationError, DirectionalPdp, Geometry, LinkEnd, PowerAngularSpectrum,
    PowerDelayProfile,
};
use pointdata::model::{
    to_f64, AsDefinition, CarrierFrequency, Column, Combine, Decimal, Environment, LocCondition,
    MetadataFields, MetadataRecord, ThresholdRule, ThresholdSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASES: usize = 1000;
const REL: f64 = 1e-9;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-12
}

fn random_pdp(rng: &mut ChaCha8Rng) -> PowerDelayProfile {
    let n = rng.random_range(1..40);
    let mut t = rng.random_range(0.0..500.0);
    let mut delays = Vec::with_capacity(n);
    let mut powers = Vec::with_capacity(n);
    for _ in 0..n {
        delays.push(t);
        t += rng.random_range(0.1..20.0);
        let p = if rng.random_bool(0.2) {
            0.0
        } else {
            10f64.powf(rng.random_range(-12.0..-4.0))
        };
        powers.push(p);
    }
    powers[rng.random_range(0..n)] = 1e-5;
    PowerDelayProfile::new(delays, powers, rng.random_range(-130.0..-90.0)).unwrap()
}

fn random_pas(rng: &mut ChaCha8Rng, width_deg: f64) -> (Vec<f64>, Vec<f64>) {
    let n = rng.random_range(1..24);
    let centre = rng.random_range(0.0..360.0);
    let angles = (0..n)
        .map(|_| (centre + rng.random_range(-width_deg / 2.0..=width_deg / 2.0)).rem_euclid(360.0))
        .collect();
    let powers = (0..n)
        .map(|_| 10f64.powf(rng.random_range(-9.0..-3.0)))
        .collect();
    (angles, powers)
}

fn spreads(angles: &[f64], powers: &[f64]) -> (f64, Result<f64, DerivationError>) {
    let pas = PowerAngularSpectrum::azimuth(angles.to_vec(), powers.to_vec()).unwrap();
    (
        angular_spread_fleury(&pas).unwrap(),
        angular_spread_3gpp(&pas),
    )
}

#[test]
fn delay_spread_scale_and_translation_invariance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for case in 0..CASES {
        let pdp = random_pdp(&mut rng);
        let ds = rms_delay_spread(&pdp).unwrap();
        assert!(ds >= 0.0);

        let c = 10f64.powf(rng.random_range(-6.0..6.0));
        let scaled = PowerDelayProfile::new(
            pdp.delays_ns().to_vec(),
            pdp.powers_mw().iter().map(|p| p * c).collect(),
            pdp.noise_floor_dbm(),
        )
        .unwrap();
        assert!(
            close(rms_delay_spread(&scaled).unwrap(), ds, REL),
            "case {case}: scale {c}"
        );

        let shift = rng.random_range(-1e4..1e4);
        let shifted = PowerDelayProfile::new(
            pdp.delays_ns().iter().map(|t| t + shift).collect(),
            pdp.powers_mw().to_vec(),
            pdp.noise_floor_dbm(),
        )
        .unwrap();
        assert!(
            close(rms_delay_spread(&shifted).unwrap(), ds, REL),
            "case {case}: shift {shift}"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn angular_spread_rotation_and_scale_invariance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for case in 0..CASES {
        let width = rng.random_range(1.0..360.0);
        let (angles, powers) = random_pas(&mut rng, width);
        let (fleury, tgpp) = spreads(&angles, &powers);
        assert!((0.0..=180.0).contains(&fleury));

        let delta = rng.random_range(-720.0..720.0);
        let rotated: Vec<f64> = angles.iter().map(|a| a + delta).collect();
        let c = 10f64.powf(rng.random_range(-6.0..6.0));
        let scaled: Vec<f64> = powers.iter().map(|p| p * c).collect();

        for (a, p) in [(&rotated, &powers), (&angles, &scaled)] {
            let (f2, g2) = spreads(a, p);
            assert!(
                close(f2, fleury, REL),
                "case {case}: fleury {f2} vs {fleury}"
            );
            match (&tgpp, g2) {
                (Ok(g), Ok(g2)) => assert!(close(g2, *g, REL), "case {case}: 3gpp {g2} vs {g}"),
                (
                    Err(DerivationError::DegenerateSpectrum),
                    Err(DerivationError::DegenerateSpectrum),
                ) => {}
                (x, y) => panic!("case {case}: {x:?} vs {y:?}"),
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn single_direction_spread_is_exactly_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for _ in 0..CASES {
        let a = rng.random_range(0.0..360.0);
        let (f, g) = spreads(&[a], &[rng.random_range(1e-9..1.0)]);
        assert_eq!(f, 0.0);
        assert_eq!(g.unwrap(), 0.0);
    }
}

#[test]
fn small_spread_definitions_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for case in 0..CASES {
        let (angles, powers) = random_pas(&mut rng, 40.0);
        let (f, g) = spreads(&angles, &powers);
        let g = g.unwrap();
        if f == 0.0 {
            assert_eq!(g, 0.0);
            continue;
        }
        assert!(g >= f);
        assert!((g - f) / f <= 0.05, "case {case}: fleury {f} 3gpp {g}");
    }
}

#[test]
fn two_equal_beams_thirty_degrees_apart() {
    let (f, g) = spreads(&[100.0, 130.0], &[1.0, 1.0]);
    let half = 15f64.to_radians();
    let fleury_oracle = half.sin().to_degrees();
    let tgpp_oracle = (-2.0 * half.cos().ln()).sqrt().to_degrees();
    assert!(close(f, fleury_oracle, 1e-12), "{f} vs {fleury_oracle}");
    assert!(close(g.as_ref().copied().unwrap(), tgpp_oracle, 1e-12));
    assert!((g.unwrap() - f).abs() / f < 0.05);
}

#[test]
fn three_tap_delay_spread() {
    let pdp = PowerDelayProfile::new(vec![0.0, 50.0, 120.0], vec![1.0, 0.5, 0.25], -120.0).unwrap();
    assert!(close(
        rms_delay_spread(&pdp).unwrap(),
        42.23355856884138,
        1e-12
    ));
}

fn rule(rel_peak: f64, above_noise: Option<f64>) -> ThresholdRule {
    let d = |v: f64| Decimal::from_f64_retain(v).unwrap().round_dp(3);
    ThresholdRule::new(Some(d(rel_peak)), above_noise.map(d), None, Combine::MaxOf).unwrap()
}

#[test]
fn tighter_threshold_never_adds_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for case in 0..CASES {
        let pdp = random_pdp(&mut rng);
        let loose_db = rng.random_range(1.0..80.0);
        let tight_db = rng.random_range(0.0..loose_db);
        let noise = rng.random_bool(0.5).then(|| rng.random_range(0.0..30.0));
        let loose = apply_threshold_pdp(&pdp, &rule(loose_db, noise)).unwrap();
        let tight = apply_threshold_pdp(&pdp, &rule(tight_db, noise.map(|n| n + 3.0)));
        let tight = match tight {
            Ok(t) => t,
            Err(DerivationError::EmptyAfterThreshold) => continue,
            Err(e) => panic!("case {case}: {e}"),
        };
        for (t, l) in tight.powers_mw().iter().zip(loose.powers_mw()) {
            assert!(t <= l, "case {case}");
        }
    }
}

#[test]
fn tighter_threshold_never_widens_decaying_profile() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    for case in 0..CASES {
        let n = rng.random_range(2..60);
        let step = rng.random_range(0.5..10.0);
        let mut p = 1e-5;
        let mut powers = Vec::with_capacity(n);
        for _ in 0..n {
            powers.push(p);
            p *= 10f64.powf(-rng.random_range(0.0..1.5));
        }
        let delays = (0..n).map(|i| i as f64 * step).collect();
        let pdp = PowerDelayProfile::new(delays, powers, -200.0).unwrap();
        let mut floors: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..60.0)).collect();
        floors.sort_by(|a, b| b.total_cmp(a));
        let mut last = f64::INFINITY;
        for db in floors {
            let ds =
                rms_delay_spread(&apply_threshold_pdp(&pdp, &rule(db, None)).unwrap()).unwrap();
            assert!(ds <= last * (1.0 + 1e-12), "case {case}: {ds} > {last}");
            last = ds;
        }
    }
}

fn scene_meta(as_def: AsDefinition) -> MetadataRecord {
    let d = |s: &str| s.parse::<Decimal>().unwrap();
    let mut f = MetadataFields::minimal(Environment::UMi, CarrierFrequency::center(d("142")));
    f.ptx_avg_dbm = Some(d("0"));
    f.g_tx_dbi = Some(d("27"));
    f.g_rx_dbi = Some(d("27"));
    f.t_pdp = Some(ThresholdSpec::from_rule(ThresholdRule::below_peak(d("25"))));
    f.as_def = Some(as_def);
    MetadataRecord::new(f).unwrap()
}

fn geometry() -> Geometry {
    Geometry {
        tx_id: "TX1".into(),
        rx_id: "RX2".into(),
        loc_condition: LocCondition::Nlos,
        tr_sep_m: "40.5".parse().unwrap(),
    }
}

const TWO_BEAM_SCENE: &str = r#"{"directions": [
  {"delays_ns": [0, 10, 20], "powers_dbm": [-60, -70, null], "noise_floor_dbm": -120,
   "azimuth_deg": 10, "zenith_deg": 90},
  {"delays_ns": [0, 10, 20], "powers_dbm": [null, -65, -72], "noise_floor_dbm": -120,
   "azimuth_deg": 40, "zenith_deg": 90, "end": "rx"}
]}"#;

struct Oracle {
    pl: f64,
    omni_ds: f64,
    mean_dir_ds: f64,
    fleury: f64,
    tgpp: f64,
}

fn two_beam_oracle() -> Oracle {
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
    let (phi_a, phi_b) = (10f64.to_radians(), 40f64.to_radians());
    let re = (pa * phi_a.cos() + pb * phi_b.cos()) / total;
    let im = (pa * phi_a.sin() + pb * phi_b.sin()) / total;
    let dev = |phi: f64| (phi.cos() - re).powi(2) + (phi.sin() - im).powi(2);
    Oracle {
        pl: 54.0 - 10.0 * total.log10(),
        omni_ds: ds(&omni),
        mean_dir_ds: (pa * ds(&a) + pb * ds(&b)) / total,
        fleury: ((pa * dev(phi_a) + pb * dev(phi_b)) / total)
            .sqrt()
            .to_degrees(),
        tgpp: (-2.0 * (re * re + im * im).sqrt().ln()).sqrt().to_degrees(),
    }
}

fn value(p: &pointdata::model::PointRecord, c: Column) -> f64 {
    p.get_f64(c).unwrap()
}

#[test]
fn two_beam_scene_matches_oracle() {
    let dirs = parse_profiles(TWO_BEAM_SCENE.as_bytes()).unwrap();
    assert_eq!(dirs.len(), 2);
    assert!(dirs
        .iter()
        .all(|d| d.end == LinkEnd::Rx && d.lobe.is_none()));
    let oracle = two_beam_oracle();
    let half_ulp = 0.5e-4 + 1e-12;

    for (def, spread) in [
        (AsDefinition::Tgpp, oracle.tgpp),
        (AsDefinition::Fleury, oracle.fleury),
    ] {
        let p = derive_point(&dirs, &scene_meta(def), &geometry()).unwrap();
        assert_eq!(p.tx_id, "TX1");
        assert_eq!(p.loc_condition, LocCondition::Nlos);
        assert_eq!(to_f64(p.freq_ghz), 142.0);
        assert!((value(&p, Column::PlDb) - oracle.pl).abs() <= half_ulp);
        assert!((value(&p, Column::OmniDsNs) - oracle.omni_ds).abs() <= half_ulp);
        assert!((value(&p, Column::MeanDirDsNs) - oracle.mean_dir_ds).abs() <= half_ulp);
        assert!(
            (value(&p, Column::OmniAsaDeg) - spread).abs() <= half_ulp,
            "{def:?}"
        );
        assert_eq!(p.omni_asa_deg, p.mean_lobe_asa_deg);
        for c in [
            Column::OmniZsaDeg,
            Column::OmniAsdDeg,
            Column::OmniZsdDeg,
            Column::MeanLobeAsdDeg,
        ] {
            assert_eq!(value(&p, c), 0.0, "{c}");
        }
    }
}

#[test]
fn directions_below_threshold_are_dropped() {
    let mut dirs = parse_profiles(TWO_BEAM_SCENE.as_bytes()).unwrap();
    dirs.push(DirectionalPdp {
        pdp: PowerDelayProfile::new(vec![0.0, 10.0, 20.0], vec![0.0; 3], -120.0).unwrap(),
        azimuth_deg: 200.0,
        zenith_deg: 90.0,
        end: LinkEnd::Rx,
        lobe: None,
    });
    let with_empty = derive_point(&dirs, &scene_meta(AsDefinition::Tgpp), &geometry()).unwrap();
    let without = derive_point(&dirs[..2], &scene_meta(AsDefinition::Tgpp), &geometry()).unwrap();
    assert_eq!(with_empty, without);
}
