//! Grammars for the free-text metadata values (thresholds, waveform, sweep,
//! sync) and for unit-bearing quantities.
//!
//! Each composite value keeps its reported text; the structured reading is a
//! pure function of that text, which is what makes metadata round-trips exact.

use std::sync::LazyLock;

use regex::Regex;
use rust_decimal::Decimal;

use crate::model::{Combine, SyncKind, ThresholdRule};

const NUM: &str = r"(\d+(?:\.\d+)?)";

static STRICT_DECIMAL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)$").unwrap());

/// Parses a plain decimal literal: optional sign, digits, optional fraction.
/// No exponent, no grouping separators, no locale variants.
pub fn parse_decimal(token: &str) -> Option<Decimal> {
    let token = token.trim();
    if !STRICT_DECIMAL.is_match(token) {
        return None;
    }
    token.parse::<Decimal>().ok()
}

/// Shortest decimal text for a value (`130.0` is written `130`).
pub fn format_decimal(value: Decimal) -> String {
    let normalized = value.normalize();
    if normalized.is_zero() {
        "0".to_string()
    } else {
        normalized.to_string()
    }
}

/// A unit spelling and the factor that converts it to the canonical unit.
pub(crate) type UnitTable = &'static [(&'static str, &'static str)];

pub(crate) const GHZ: UnitTable = &[("GHz", "1"), ("MHz", "0.001"), ("kHz", "0.000001")];
pub(crate) const DB: UnitTable = &[("dB", "1")];
pub(crate) const DBM: UnitTable = &[("dBm", "1")];
pub(crate) const DBI: UnitTable = &[("dBi", "1"), ("dB", "1")];
pub(crate) const DEG: UnitTable = &[("deg", "1"), ("°", "1"), ("degrees", "1")];
pub(crate) const NS: UnitTable = &[
    ("ns", "1"),
    ("us", "1000"),
    ("μs", "1000"),
    ("µs", "1000"),
    ("ms", "1000000"),
];
pub(crate) const MSPS: UnitTable = &[("MSps", "1"), ("kSps", "0.001"), ("GSps", "1000")];
pub(crate) const MPS: UnitTable = &[("m/s", "1")];
pub(crate) const MM: UnitTable = &[("mm", "1")];
pub(crate) const KHZ: UnitTable = &[("kHz", "1"), ("Hz", "0.001"), ("MHz", "1000")];

static QUANTITY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+))\s*(.*?)\s*$").unwrap());

/// Splits `"<number> <unit>"`; the unit may be empty.
pub(crate) fn split_quantity(text: &str) -> Option<(Decimal, &str)> {
    let caps = QUANTITY.captures(text)?;
    let value = parse_decimal(caps.get(1)?.as_str())?;
    Some((value, caps.get(2).map_or("", |m| m.as_str())))
}

/// Parses a quantity and converts it to the first unit of `units`.
/// A bare number is taken to be in the canonical unit.
pub(crate) fn parse_quantity(text: &str, units: UnitTable) -> Result<Decimal, String> {
    let (value, unit) = split_quantity(text)
        .ok_or_else(|| format!("expected a number with unit {}", units[0].0))?;
    if unit.is_empty() {
        return Ok(value);
    }
    // exact spelling first so that "ms" and "MSps"-style prefixes stay distinct
    let factor = units
        .iter()
        .find(|(u, _)| *u == unit)
        .or_else(|| units.iter().find(|(u, _)| u.eq_ignore_ascii_case(unit)))
        .map(|(_, f)| *f)
        .ok_or_else(|| {
            let known: Vec<&str> = units.iter().map(|(u, _)| *u).collect();
            format!("unit {unit:?} not one of {}", known.join(", "))
        })?;
    let factor: Decimal = factor.parse().expect("unit factor literal");
    Ok((value * factor).normalize())
}

pub(crate) fn format_quantity(value: Decimal, units: UnitTable) -> String {
    format!("{} {}", format_decimal(value), units[0].0)
}

/// Failure modes of [`parse_threshold`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThresholdTextError {
    NoComponents,
    Invalid(String),
}

static BELOW_PEAK: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i){NUM}\s*dB\s+below")).unwrap());
static ABOVE_NOISE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i)(?:{NUM}\s*dB\s+above\s+(?:the\s+)?noise|\+\s*{NUM}\s*dB\s*\(\s*noise\s*\))"
    ))
    .unwrap()
});
static GATE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i)gate\s*=?\s*{NUM}\s*(ns|us|μs|µs)")).unwrap());
static MAX_OF: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^\s*max\s*\(").unwrap());

fn single_match(re: &Regex, text: &str, what: &str) -> Result<Option<Decimal>, ThresholdTextError> {
    let mut found = None;
    for caps in re.captures_iter(text) {
        if found.is_some() {
            return Err(ThresholdTextError::Invalid(format!(
                "more than one {what} component"
            )));
        }
        let token = caps
            .iter()
            .skip(1)
            .flatten()
            .next()
            .map(|m| m.as_str())
            .unwrap_or_default();
        found =
            Some(parse_decimal(token).ok_or_else(|| {
                ThresholdTextError::Invalid(format!("bad {what} value {token:?}"))
            })?);
    }
    Ok(found)
}

/// Reads a thresholding rule such as
/// `max(25 dB below peak, 5 dB above noise floor)` or
/// `τ_gate = 966.67 ns; +12 dB (noise)`.
pub fn parse_threshold(text: &str) -> Result<ThresholdRule, ThresholdTextError> {
    let rel = single_match(&BELOW_PEAK, text, "below-peak")?;
    let noise = single_match(&ABOVE_NOISE, text, "above-noise")?;
    let mut gate = None;
    for caps in GATE.captures_iter(text) {
        if gate.is_some() {
            return Err(ThresholdTextError::Invalid(
                "more than one gate component".into(),
            ));
        }
        let value = parse_decimal(&caps[1])
            .ok_or_else(|| ThresholdTextError::Invalid(format!("bad gate value {:?}", &caps[1])))?;
        let scale = if caps[2].eq_ignore_ascii_case("ns") {
            Decimal::ONE
        } else {
            Decimal::from(1000)
        };
        gate = Some((value * scale).normalize());
    }
    let combine = if MAX_OF.is_match(text) {
        Combine::MaxOf
    } else {
        Combine::AllOf
    };
    ThresholdRule::new(rel, noise, gate, combine).map_err(|e| match e {
        crate::model::ModelError::EmptyThresholdRule { .. } => ThresholdTextError::NoComponents,
        other => ThresholdTextError::Invalid(other.to_string()),
    })
}

/// Canonical text for a rule; parses back to the same rule.
pub fn describe_threshold(rule: &ThresholdRule) -> String {
    let mut floors = Vec::new();
    if let Some(v) = rule.rel_peak_db() {
        floors.push(format!("{} dB below peak", format_decimal(v)));
    }
    if let Some(v) = rule.above_noise_db() {
        floors.push(format!("{} dB above noise floor", format_decimal(v)));
    }
    let gate = rule
        .gate_ns()
        .map(|g| format!("gate = {} ns", format_decimal(g)));
    let mut parts = Vec::new();
    match rule.combine() {
        Combine::MaxOf if floors.len() > 1 || (gate.is_some() && !floors.is_empty()) => {
            parts.push(format!("max({})", floors.join(", ")));
        }
        _ => parts.extend(floors),
    }
    parts.extend(gate);
    parts.join("; ")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct WaveformParts {
    pub kind: Option<String>,
    pub pn_length_chips: Option<u64>,
    pub n_avg: Option<u64>,
    pub papr_db: Option<Decimal>,
    pub spreading_factor: Option<u64>,
}

static PN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^(\d+)\s*-?\s*chips?(?:\s+PN)?$").unwrap());
static N_AVG: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^(\d+)\s*(?:PDPs?\s*)?(?:avg\.?|averages?|averaging)$").unwrap()
});
static NO_AVG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^no\s+averaging$").unwrap());
static PAPR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i)^PAPR\s*=?\s*{NUM}\s*dB$")).unwrap());
static SF: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^(?:SF|spreading\s+factor)\s*=?\s*(\d+)$").unwrap());

fn set_once<T>(slot: &mut Option<T>, value: T, what: &str) -> Result<(), String> {
    if slot.is_some() {
        return Err(format!("{what} given more than once"));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_count(token: &str, what: &str) -> Result<u64, String> {
    token.parse().map_err(|_| format!("bad {what} {token:?}"))
}

fn is_missing_part(part: &str) -> bool {
    part.is_empty() || part == "--"
}

pub fn parse_waveform(text: &str) -> Result<WaveformParts, String> {
    let mut parts = WaveformParts::default();
    let mut kinds: Vec<&str> = Vec::new();
    for part in text.split(';').map(str::trim) {
        if is_missing_part(part) {
            continue;
        }
        if let Some(c) = PN.captures(part) {
            set_once(
                &mut parts.pn_length_chips,
                parse_count(&c[1], "PN length")?,
                "PN length",
            )?;
        } else if let Some(c) = N_AVG.captures(part) {
            set_once(
                &mut parts.n_avg,
                parse_count(&c[1], "averaging count")?,
                "averaging",
            )?;
        } else if NO_AVG.is_match(part) {
            set_once(&mut parts.n_avg, 1, "averaging")?;
        } else if let Some(c) = PAPR.captures(part) {
            let v = parse_decimal(&c[1]).ok_or("bad PAPR")?;
            set_once(&mut parts.papr_db, v, "PAPR")?;
        } else if let Some(c) = SF.captures(part) {
            set_once(
                &mut parts.spreading_factor,
                parse_count(&c[1], "spreading factor")?,
                "spreading factor",
            )?;
        } else {
            kinds.push(part);
        }
    }
    if !kinds.is_empty() {
        parts.kind = Some(kinds.join("; "));
    }
    Ok(parts)
}

pub fn describe_waveform(parts: &WaveformParts) -> String {
    let mut out = Vec::new();
    if let Some(pn) = parts.pn_length_chips {
        out.push(format!("{pn} chip PN"));
    }
    if let Some(kind) = &parts.kind {
        out.push(kind.clone());
    }
    match parts.n_avg {
        Some(1) => out.push("No averaging".to_string()),
        Some(n) => out.push(format!("{n} PDP avg.")),
        None => {}
    }
    if let Some(p) = parts.papr_db {
        out.push(format!("PAPR {} dB", format_decimal(p)));
    }
    if let Some(sf) = parts.spreading_factor {
        out.push(format!("SF {sf}"));
    }
    out.join("; ")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SweepParts {
    pub ifbw_khz: Option<Decimal>,
    pub n_pts: Option<u64>,
    pub averaging: Option<String>,
}

static IFBW: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^IFBW\s*=?\s*(.+)$").unwrap());
static NPTS: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^N_?\{?pts\}?\s*=?\s*(\d+)$").unwrap());

pub fn parse_sweep(text: &str) -> Result<SweepParts, String> {
    let mut parts = SweepParts::default();
    let mut rest: Vec<&str> = Vec::new();
    for part in text.split(';').map(str::trim) {
        if is_missing_part(part) {
            continue;
        }
        if let Some(c) = IFBW.captures(part) {
            let v = parse_quantity(&c[1], KHZ).map_err(|e| format!("IFBW: {e}"))?;
            set_once(&mut parts.ifbw_khz, v, "IFBW")?;
        } else if let Some(c) = NPTS.captures(part) {
            set_once(
                &mut parts.n_pts,
                parse_count(&c[1], "point count")?,
                "N_pts",
            )?;
        } else {
            rest.push(part);
        }
    }
    if !rest.is_empty() {
        parts.averaging = Some(rest.join("; "));
    }
    Ok(parts)
}

pub fn describe_sweep(parts: &SweepParts) -> String {
    let mut out = Vec::new();
    if let Some(v) = parts.ifbw_khz {
        out.push(format!("IFBW {} kHz", format_decimal(v)));
    }
    if let Some(n) = parts.n_pts {
        out.push(format!("N_pts = {n}"));
    }
    if let Some(a) = &parts.averaging {
        out.push(a.clone());
    }
    out.join("; ")
}

/// Keyword classification of a synchronization description.
pub fn classify_sync(text: &str) -> Option<SyncKind> {
    let lower = text.to_lowercase();
    let rules: [(&[&str], SyncKind); 5] = [
        (&["vna"], SyncKind::VnaInternal),
        (&["gps", "gnss"], SyncKind::Gps),
        (&["ptp", "precision time"], SyncKind::Ptp),
        (&["trigger"], SyncKind::ExternalTrigger),
        (
            &["clock", "rubidium", "reference"],
            SyncKind::ReferenceClock,
        ),
    ];
    rules
        .iter()
        .find(|(words, _)| words.iter().any(|w| lower.contains(w)))
        .map(|(_, kind)| *kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn strict_decimal_syntax() {
        assert_eq!(parse_decimal("24.43"), Some(d("24.43")));
        assert_eq!(parse_decimal(" -1 "), Some(d("-1")));
        assert_eq!(parse_decimal(".5"), Some(d("0.5")));
        assert_eq!(parse_decimal("1,5"), None);
        assert_eq!(parse_decimal("1_000"), None);
        assert_eq!(parse_decimal("1e3"), None);
        assert_eq!(parse_decimal("--"), None);
        assert_eq!(parse_decimal(""), None);
    }

    #[test]
    fn minimal_representation() {
        assert_eq!(format_decimal(d("130.0")), "130");
        assert_eq!(format_decimal(d("53.02")), "53.02");
        assert_eq!(format_decimal(d("-0.0")), "0");
        assert_eq!(format_decimal(d("0.10")), "0.1");
    }

    #[test]
    fn quantities_convert_units() {
        assert_eq!(parse_quantity("142 GHz", GHZ), Ok(d("142")));
        assert_eq!(parse_quantity("145500 MHz", GHZ), Ok(d("145.5")));
        assert_eq!(parse_quantity("1 μs", NS), Ok(d("1000")));
        assert_eq!(parse_quantity("1 µs", NS), Ok(d("1000")));
        assert_eq!(parse_quantity("8°", DEG), Ok(d("8")));
        assert_eq!(parse_quantity("2.5 Msps", MSPS), Ok(d("2.5")));
        assert_eq!(parse_quantity("-11 dB", DB), Ok(d("-11")));
        assert!(parse_quantity("3 furlongs", DB).is_err());
        assert!(parse_quantity("dB", DB).is_err());
    }

    #[test]
    fn nyu_pdp_threshold() {
        let rule = parse_threshold("max(25 dB below peak, 5 dB above noise floor)").unwrap();
        assert_eq!(rule.rel_peak_db(), Some(d("25")));
        assert_eq!(rule.above_noise_db(), Some(d("5")));
        assert_eq!(rule.gate_ns(), None);
        assert_eq!(rule.combine(), Combine::MaxOf);
    }

    #[test]
    fn usc_gated_threshold() {
        let rule = parse_threshold("τ_gate = 966.67 ns; +12 dB (noise)").unwrap();
        assert_eq!(rule.gate_ns(), Some(d("966.67")));
        assert_eq!(rule.above_noise_db(), Some(d("12")));
        assert_eq!(rule.rel_peak_db(), None);
        assert_eq!(rule.combine(), Combine::AllOf);
        assert!(rule.is_gate_and_floor());
    }

    #[test]
    fn single_component_threshold() {
        let rule = parse_threshold("10 dB below max. PAS power").unwrap();
        assert_eq!(rule.rel_peak_db(), Some(d("10")));
        assert_eq!(rule.combine(), Combine::MaxOf);
        assert_eq!(describe_threshold(&rule), "10 dB below peak");
    }

    #[test]
    fn threshold_errors() {
        assert_eq!(
            parse_threshold("none"),
            Err(ThresholdTextError::NoComponents)
        );
        assert!(matches!(
            parse_threshold("10 dB below peak; 20 dB below peak"),
            Err(ThresholdTextError::Invalid(_))
        ));
    }

    #[test]
    fn described_thresholds_reparse() {
        for text in [
            "max(25 dB below peak, 5 dB above noise floor)",
            "τ_gate = 966.67 ns; +12 dB (noise)",
            "gate = 1 us",
            "max(30 dB below peak); gate = 500 ns",
        ] {
            let rule = parse_threshold(text).unwrap();
            assert_eq!(
                parse_threshold(&describe_threshold(&rule)).unwrap(),
                rule,
                "{text}"
            );
        }
    }

    #[test]
    fn waveform_grammar() {
        let w = parse_waveform("2047 chip PN; Sliding corr.; 20 PDP avg.").unwrap();
        assert_eq!(w.pn_length_chips, Some(2047));
        assert_eq!(w.kind.as_deref(), Some("Sliding corr."));
        assert_eq!(w.n_avg, Some(20));
        let w = parse_waveform("--; --; No averaging").unwrap();
        assert_eq!(
            w,
            WaveformParts {
                n_avg: Some(1),
                ..Default::default()
            }
        );
        let w = parse_waveform("OFDM; PAPR 3.5 dB; SF 4").unwrap();
        assert_eq!(w.papr_db, Some(d("3.5")));
        assert_eq!(w.spreading_factor, Some(4));
        assert_eq!(parse_waveform(&describe_waveform(&w)).unwrap(), w);
        assert!(parse_waveform("10 PDP avg.; 20 PDP avg.").is_err());
    }

    #[test]
    fn sweep_grammar() {
        let s = parse_sweep("IFBW 10 kHz; N_pts = 1001").unwrap();
        assert_eq!(s.ifbw_khz, Some(d("10")));
        assert_eq!(s.n_pts, Some(1001));
        assert_eq!(s.averaging, None);
        let s = parse_sweep("IFBW 500 Hz; 4 sweeps averaged").unwrap();
        assert_eq!(s.ifbw_khz, Some(d("0.5")));
        assert_eq!(s.averaging.as_deref(), Some("4 sweeps averaged"));
        assert_eq!(parse_sweep(&describe_sweep(&s)).unwrap(), s);
    }

    #[test]
    fn sync_keywords() {
        assert_eq!(
            classify_sync("Rubidium clocks at TX & RX"),
            Some(SyncKind::ReferenceClock)
        );
        assert_eq!(classify_sync("VNA Internal"), Some(SyncKind::VnaInternal));
        assert_eq!(classify_sync("White Rabbit PTP"), Some(SyncKind::Ptp));
        assert_eq!(classify_sync("GPS-disciplined"), Some(SyncKind::Gps));
        assert_eq!(classify_sync("cable"), None);
    }
}
