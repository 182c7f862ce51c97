//! Metadata documents as ordered key/value entries.
//!
//! Keys are the short canonical names listed by [`metadata_keys`]; the labels
//! used in published metadata tables (`Env.`, `f_c`, `AS Def.`, ...) are
//! accepted as aliases, including the combined rows such as `Δφ/Δθ` or
//! `τ_max; f_rep` that carry two fields in one value.

use std::sync::LazyLock;

use regex::Regex;

use super::text::{
    self, format_decimal, format_quantity, parse_decimal, parse_quantity, UnitTable,
};
use super::{FormatDialect, FormatError, Result};
use crate::model::{
    AntennaKind, AntennaType, ArrayGeometry, ArrayKind, AsDefinition, CarrierFrequency,
    CompatFinding, Decimal, Environment, FrequencyKind, MetadataFields, MetadataRecord, Mobility,
    ModelError, Polarization, RepetitionInterval, SweepParams, Sync, ThresholdSpec,
    TrajectoryPoint, Waveform,
};

/// One raw `key = value` entry; `value: None` is an explicit JSON null.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: Option<String>,
}

/// A parsed metadata document: campaign-level keys plus the metadata record.
#[derive(Debug, Clone, PartialEq)]
pub struct MetadataDocument {
    pub institution: Option<String>,
    pub campaign_id: Option<String>,
    pub map_ref: Option<String>,
    pub metadata: MetadataRecord,
    /// Info findings from lenient parsing (unknown or repeated keys).
    pub findings: Vec<CompatFinding>,
}

impl MetadataDocument {
    pub fn bare(metadata: MetadataRecord) -> Self {
        MetadataDocument {
            institution: None,
            campaign_id: None,
            map_ref: None,
            metadata,
            findings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Key {
    Institution,
    CampaignId,
    MapRef,
    Env,
    AzRes,
    ElRes,
    Mobility,
    Speed,
    Trajectory,
    Fc,
    Bw,
    PtxAvg,
    DrMax,
    Nf,
    RxSens,
    TPdp,
    TPas,
    TauMax,
    FRep,
    Waveform,
    DtS,
    Fs,
    Sync,
    SweepFd,
    AsDef,
    AntModel,
    FAntOp,
    AntType,
    BwAnt,
    GTx,
    GRx,
    HpbwTx,
    HpbwRx,
    Sll,
    Fbr,
    Xpd,
    Pol,
    ArrayGeometry,
    NElements,
    PlKind,
}

const KEYS: [(Key, &str); 40] = [
    (Key::Institution, "institution"),
    (Key::CampaignId, "campaign_id"),
    (Key::MapRef, "map_ref"),
    (Key::Env, "env"),
    (Key::AzRes, "az_res"),
    (Key::ElRes, "el_res"),
    (Key::Mobility, "mobility"),
    (Key::Speed, "speed"),
    (Key::Trajectory, "trajectory"),
    (Key::Fc, "fc"),
    (Key::Bw, "bw"),
    (Key::PtxAvg, "ptx_avg"),
    (Key::DrMax, "dr_max"),
    (Key::Nf, "nf"),
    (Key::RxSens, "rx_sens"),
    (Key::TPdp, "t_pdp"),
    (Key::TPas, "t_pas"),
    (Key::TauMax, "tau_max"),
    (Key::FRep, "f_rep"),
    (Key::Waveform, "waveform"),
    (Key::DtS, "dt_s"),
    (Key::Fs, "fs"),
    (Key::Sync, "sync"),
    (Key::SweepFd, "sweep_fd"),
    (Key::AsDef, "as_def"),
    (Key::AntModel, "ant_model"),
    (Key::FAntOp, "f_ant_op"),
    (Key::AntType, "ant_type"),
    (Key::BwAnt, "bw_ant"),
    (Key::GTx, "g_tx"),
    (Key::GRx, "g_rx"),
    (Key::HpbwTx, "hpbw_tx"),
    (Key::HpbwRx, "hpbw_rx"),
    (Key::Sll, "sll"),
    (Key::Fbr, "fbr"),
    (Key::Xpd, "xpd"),
    (Key::Pol, "pol"),
    (Key::ArrayGeometry, "array_geometry"),
    (Key::NElements, "n_elements"),
    (Key::PlKind, "pl_kind"),
];

/// Canonical metadata keys in document order.
pub fn metadata_keys() -> impl Iterator<Item = &'static str> {
    KEYS.iter().map(|(_, name)| *name)
}

impl Key {
    fn name(self) -> &'static str {
        KEYS.iter()
            .find(|(k, _)| *k == self)
            .map(|(_, n)| *n)
            .expect("every key is listed")
    }
}

/// How an alias maps onto fields.
#[derive(Debug, Clone, Copy)]
enum Target {
    One(Key),
    /// Value split on `sep` into one part per key; with `broadcast`, a value
    /// without a separator applies to every key.
    Split {
        sep: char,
        keys: &'static [Key],
        broadcast: bool,
    },
}

const ALIASES: &[(&str, Target)] = &[
    ("Env.", Target::One(Key::Env)),
    ("Environment", Target::One(Key::Env)),
    ("Az Resolution", Target::One(Key::AzRes)),
    ("Δφ", Target::One(Key::AzRes)),
    ("El Resolution", Target::One(Key::ElRes)),
    ("Δθ", Target::One(Key::ElRes)),
    (
        "Δφ/Δθ",
        Target::Split {
            sep: '/',
            keys: &[Key::AzRes, Key::ElRes],
            broadcast: false,
        },
    ),
    ("v", Target::One(Key::Mobility)),
    ("Mobility Conditions", Target::One(Key::Mobility)),
    ("f_c", Target::One(Key::Fc)),
    ("Frequency", Target::One(Key::Fc)),
    ("Bandwidth", Target::One(Key::Bw)),
    ("P_TX,avg", Target::One(Key::PtxAvg)),
    ("Average TX Power", Target::One(Key::PtxAvg)),
    ("Max. Dynamic Range", Target::One(Key::DrMax)),
    ("Noise Figure", Target::One(Key::Nf)),
    ("Receiver Sensitivity", Target::One(Key::RxSens)),
    ("τ_max", Target::One(Key::TauMax)),
    (
        "τ_max; f_rep",
        Target::Split {
            sep: ';',
            keys: &[Key::TauMax, Key::FRep],
            broadcast: false,
        },
    ),
    ("L_PN, N_avg", Target::One(Key::Waveform)),
    ("Δt_s", Target::One(Key::DtS)),
    ("Sampling time resolution", Target::One(Key::DtS)),
    ("Sampling rate", Target::One(Key::Fs)),
    ("Sync.", Target::One(Key::Sync)),
    ("Synchronization", Target::One(Key::Sync)),
    ("Sweep Params", Target::One(Key::SweepFd)),
    ("Sweep Params (FD)", Target::One(Key::SweepFd)),
    ("AS Def.", Target::One(Key::AsDef)),
    ("AS Definition", Target::One(Key::AsDef)),
    ("Ant. Model", Target::One(Key::AntModel)),
    ("f_Ant,op", Target::One(Key::FAntOp)),
    (
        "Ant. Model; f_Ant,op",
        Target::Split {
            sep: ';',
            keys: &[Key::AntModel, Key::FAntOp],
            broadcast: false,
        },
    ),
    ("Ant. Type", Target::One(Key::AntType)),
    ("BW_Ant.", Target::One(Key::BwAnt)),
    (
        "G_TX/G_RX",
        Target::Split {
            sep: '/',
            keys: &[Key::GTx, Key::GRx],
            broadcast: true,
        },
    ),
    ("θ_3dB,TX", Target::One(Key::HpbwTx)),
    ("θ_3dB,RX", Target::One(Key::HpbwRx)),
    (
        "θ_3dB,TX/θ_3dB,RX",
        Target::Split {
            sep: '/',
            keys: &[Key::HpbwTx, Key::HpbwRx],
            broadcast: true,
        },
    ),
    (
        "HPBW",
        Target::Split {
            sep: '/',
            keys: &[Key::HpbwTx, Key::HpbwRx],
            broadcast: true,
        },
    ),
    ("Polarization", Target::One(Key::Pol)),
    ("Number of Elements", Target::One(Key::NElements)),
];

fn normalize_key(key: &str) -> String {
    key.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

fn resolve(key: &str) -> Option<Target> {
    let wanted = normalize_key(key);
    KEYS.iter()
        .find(|(_, name)| normalize_key(name) == wanted)
        .map(|(k, _)| Target::One(*k))
        .or_else(|| {
            ALIASES
                .iter()
                .find(|(alias, _)| normalize_key(alias) == wanted)
                .map(|(_, t)| *t)
        })
}

#[derive(Default)]
struct Builder {
    institution: Option<String>,
    campaign_id: Option<String>,
    map_ref: Option<String>,
    env: Option<Environment>,
    az_res: Option<Decimal>,
    el_res: Option<Decimal>,
    mobility: Option<Mobility>,
    speed: Option<Decimal>,
    trajectory: Option<Vec<TrajectoryPoint>>,
    fc: Option<CarrierFrequency>,
    bw: Option<Decimal>,
    ptx_avg: Option<Decimal>,
    dr_max: Option<Decimal>,
    nf: Option<Decimal>,
    rx_sens: Option<Decimal>,
    t_pdp: Option<ThresholdSpec>,
    t_pas: Option<ThresholdSpec>,
    tau_max: Option<Decimal>,
    f_rep: Option<RepetitionInterval>,
    waveform: Option<Waveform>,
    dt_s: Option<Decimal>,
    fs: Option<Decimal>,
    sync: Option<Sync>,
    sweep_fd: Option<SweepParams>,
    as_def: Option<AsDefinition>,
    ant_model: Option<String>,
    f_ant_op: Option<String>,
    ant_type: Option<AntennaType>,
    bw_ant: Option<Decimal>,
    g_tx: Option<Decimal>,
    g_rx: Option<Decimal>,
    hpbw_tx: Option<Decimal>,
    hpbw_rx: Option<Decimal>,
    sll: Option<Decimal>,
    fbr: Option<Decimal>,
    xpd: Option<Decimal>,
    pol: Option<Polarization>,
    array_geometry: Option<ArrayGeometry>,
    n_elements: Option<u32>,
    pl_kind: Option<String>,
    seen: Vec<Key>,
}

static FC: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^(.*?)\s*\(\s*(center|centre|start)\s*\)\s*$").unwrap());
static TRAJECTORY_POINT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)").unwrap()
});
static F_REP: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+))\s*(ms|s|us|μs|µs|ns|Hz|kHz|MHz)$").unwrap()
});

fn quantity(value: &str, units: UnitTable) -> std::result::Result<Decimal, String> {
    parse_quantity(value, units)
}

fn model_err(e: ModelError) -> String {
    e.to_string()
}

fn parse_trajectory(value: &str) -> std::result::Result<Vec<TrajectoryPoint>, String> {
    let mut points = Vec::new();
    let mut consumed = 0;
    for caps in TRAJECTORY_POINT.captures_iter(value) {
        let coord = |i: usize| {
            parse_decimal(&caps[i])
                .ok_or_else(|| format!("bad trajectory coordinate {:?}", &caps[i]))
        };
        points.push(TrajectoryPoint {
            x: coord(1)?,
            y: coord(2)?,
            t: coord(3)?,
        });
        consumed += caps[0].len();
    }
    let leftover = value.len() - consumed;
    let separators = value
        .chars()
        .filter(|c| *c == ';' || c.is_whitespace())
        .map(char::len_utf8)
        .sum::<usize>();
    if points.is_empty() || leftover > separators {
        return Err("expected (x, y, t) points separated by ';'".into());
    }
    Ok(points)
}

fn parse_ant_type(value: &str) -> std::result::Result<AntennaType, String> {
    let lower = value.to_lowercase();
    let (kind, suffix_len) = [
        (AntennaKind::PatchArray, "patch array"),
        (AntennaKind::Horn, "horn"),
        (AntennaKind::Dipole, "dipole"),
    ]
    .into_iter()
    .find(|(_, word)| lower.ends_with(word))
    .map(|(k, w)| (k, w.len()))
    .ok_or_else(|| {
        format!("unknown antenna type {value:?} (expected horn, dipole or patch array)")
    })?;
    let subtype = value[..value.len() - suffix_len].trim();
    Ok(AntennaType {
        kind,
        subtype: (!subtype.is_empty()).then(|| subtype.to_string()),
    })
}

fn parse_array_geometry(value: &str) -> std::result::Result<ArrayGeometry, String> {
    let mut parts = value.split(';').map(str::trim);
    let kind = match parts
        .next()
        .unwrap_or_default()
        .to_ascii_uppercase()
        .as_str()
    {
        "ULA" => ArrayKind::Ula,
        "UPA" => ArrayKind::Upa,
        "NONE" => ArrayKind::None,
        other => return Err(format!("unknown array geometry {other:?}")),
    };
    let spacing_mm = parts.next().map(|s| quantity(s, text::MM)).transpose()?;
    if parts.next().is_some() {
        return Err("expected '<kind>; <spacing> mm'".into());
    }
    Ok(ArrayGeometry { kind, spacing_mm })
}

impl Builder {
    fn apply(&mut self, key: Key, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key {
            Key::Institution => self.institution = Some(v.to_string()),
            Key::CampaignId => self.campaign_id = Some(v.to_string()),
            Key::MapRef => self.map_ref = Some(v.to_string()),
            Key::Env => self.env = Some(v.parse()?),
            Key::AzRes => self.az_res = Some(quantity(v, text::DEG)?),
            Key::ElRes => self.el_res = Some(quantity(v, text::DEG)?),
            Key::Mobility => {
                self.mobility = Some(match v.to_ascii_lowercase().as_str() {
                    "static" => Mobility::Static,
                    "mobile" => Mobility::Mobile,
                    other => return Err(format!("expected Static or Mobile, got {other:?}")),
                })
            }
            Key::Speed => self.speed = Some(quantity(v, text::MPS)?),
            Key::Trajectory => self.trajectory = Some(parse_trajectory(v)?),
            Key::Fc => {
                let caps = FC.captures(v).ok_or(
                    "frequency needs a (center) or (start) flag, e.g. \"142 GHz (center)\"",
                )?;
                let kind = if caps[2].eq_ignore_ascii_case("start") {
                    FrequencyKind::Start
                } else {
                    FrequencyKind::Center
                };
                self.fc = Some(CarrierFrequency {
                    ghz: quantity(&caps[1], text::GHZ)?,
                    kind,
                });
            }
            Key::Bw => self.bw = Some(quantity(v, text::GHZ)?),
            Key::PtxAvg => self.ptx_avg = Some(quantity(v, text::DBM)?),
            Key::DrMax => self.dr_max = Some(quantity(v, text::DB)?),
            Key::Nf => self.nf = Some(quantity(v, text::DB)?),
            Key::RxSens => self.rx_sens = Some(quantity(v, text::DBM)?),
            Key::TPdp => self.t_pdp = Some(ThresholdSpec::parse("t_pdp", v).map_err(model_err)?),
            Key::TPas => self.t_pas = Some(ThresholdSpec::parse("t_pas", v).map_err(model_err)?),
            Key::TauMax => self.tau_max = Some(quantity(v, text::NS)?),
            Key::FRep => {
                let caps = F_REP
                    .captures(v)
                    .ok_or("expected '<value> <unit>' (ms, s, us, Hz, kHz)")?;
                self.f_rep = Some(RepetitionInterval {
                    value: parse_decimal(&caps[1]).ok_or("bad repetition value")?,
                    unit: caps[2].to_string(),
                });
            }
            Key::Waveform => self.waveform = Some(Waveform::parse(v).map_err(model_err)?),
            Key::DtS => self.dt_s = Some(quantity(v, text::NS)?),
            Key::Fs => self.fs = Some(quantity(v, text::MSPS)?),
            Key::Sync => self.sync = Some(Sync::parse(v).map_err(model_err)?),
            Key::SweepFd => self.sweep_fd = Some(SweepParams::parse(v).map_err(model_err)?),
            Key::AsDef => self.as_def = Some(v.parse()?),
            Key::AntModel => self.ant_model = Some(v.to_string()),
            Key::FAntOp => self.f_ant_op = Some(v.to_string()),
            Key::AntType => self.ant_type = Some(parse_ant_type(v)?),
            Key::BwAnt => self.bw_ant = Some(quantity(v, text::GHZ)?),
            Key::GTx => self.g_tx = Some(quantity(v, text::DBI)?),
            Key::GRx => self.g_rx = Some(quantity(v, text::DBI)?),
            Key::HpbwTx => self.hpbw_tx = Some(quantity(v, text::DEG)?),
            Key::HpbwRx => self.hpbw_rx = Some(quantity(v, text::DEG)?),
            Key::Sll => self.sll = Some(quantity(v, text::DB)?),
            Key::Fbr => self.fbr = Some(quantity(v, text::DB)?),
            Key::Xpd => self.xpd = Some(quantity(v, text::DB)?),
            Key::Pol => self.pol = Some(v.parse()?),
            Key::ArrayGeometry => self.array_geometry = Some(parse_array_geometry(v)?),
            Key::NElements => {
                self.n_elements = Some(
                    v.parse()
                        .map_err(|_| format!("expected an element count, got {v:?}"))?,
                )
            }
            Key::PlKind => self.pl_kind = Some(v.to_string()),
        }
        Ok(())
    }

    fn build(self) -> Result<MetadataDocument> {
        let env = self.env.ok_or(FormatError::MissingRequired("env"))?;
        let fc = self.fc.ok_or(FormatError::MissingRequired("fc"))?;
        let fields = MetadataFields {
            env,
            az_res_deg: self.az_res,
            el_res_deg: self.el_res,
            mobility: self.mobility,
            speed_mps: self.speed,
            trajectory: self.trajectory.unwrap_or_default(),
            fc,
            bw_ghz: self.bw,
            ptx_avg_dbm: self.ptx_avg,
            dr_max_db: self.dr_max,
            nf_db: self.nf,
            rx_sens_dbm: self.rx_sens,
            t_pdp: self.t_pdp,
            t_pas: self.t_pas,
            tau_max_ns: self.tau_max,
            f_rep: self.f_rep,
            waveform: self.waveform,
            dt_s_ns: self.dt_s,
            fs_msps: self.fs,
            sync: self.sync,
            sweep_fd: self.sweep_fd,
            as_def: self.as_def,
            ant_model: self.ant_model,
            f_ant_op_band: self.f_ant_op,
            ant_type: self.ant_type,
            bw_ant_ghz: self.bw_ant,
            g_tx_dbi: self.g_tx,
            g_rx_dbi: self.g_rx,
            hpbw_tx_deg: self.hpbw_tx,
            hpbw_rx_deg: self.hpbw_rx,
            sll_db: self.sll,
            fbr_db: self.fbr,
            xpd_db: self.xpd,
            pol: self.pol,
            array_geometry: self.array_geometry,
            n_elements: self.n_elements,
            pl_kind: self.pl_kind,
        };
        Ok(MetadataDocument {
            institution: self.institution,
            campaign_id: self.campaign_id,
            map_ref: self.map_ref,
            metadata: MetadataRecord::new(fields).map_err(FormatError::InvalidMetadata)?,
            findings: Vec::new(),
        })
    }
}

pub(super) fn document_from_entries(
    entries: &[Entry],
    dialect: &FormatDialect,
) -> Result<MetadataDocument> {
    let missing = dialect.missing_token();
    let mut builder = Builder::default();
    let mut findings = Vec::new();

    for entry in entries {
        let Some(target) = resolve(&entry.key) else {
            if dialect.is_strict() {
                return Err(FormatError::UnknownKey {
                    row: entry.line,
                    key: entry.key.clone(),
                });
            }
            findings.push(CompatFinding::info(
                "UNKNOWN_KEY",
                &entry.key,
                format!("line {}: unknown metadata key ignored", entry.line),
            ));
            continue;
        };
        let value = entry.value.as_deref().map(str::trim).unwrap_or(missing);
        let assignments: Vec<(Key, &str)> = match target {
            Target::One(key) => vec![(key, value)],
            Target::Split {
                sep,
                keys,
                broadcast,
            } => {
                let parts: Vec<&str> = value.split(sep).map(str::trim).collect();
                if parts.len() == keys.len() {
                    keys.iter().copied().zip(parts).collect()
                } else if broadcast && parts.len() == 1 {
                    keys.iter().map(|k| (*k, value)).collect()
                } else {
                    return Err(FormatError::ValueParse {
                        row: entry.line,
                        column: entry.key.clone(),
                        token: value.to_string(),
                        reason: format!("expected {} parts separated by {sep:?}", keys.len()),
                    });
                }
            }
        };
        for (key, part) in assignments {
            if builder.seen.contains(&key) {
                if dialect.is_strict() {
                    return Err(FormatError::DuplicateKey {
                        row: entry.line,
                        field: key.name().to_string(),
                    });
                }
                findings.push(CompatFinding::info(
                    "DUPLICATE_KEY",
                    key.name(),
                    format!("line {}: repeated field ignored", entry.line),
                ));
                continue;
            }
            builder.seen.push(key);
            if part == missing || part.is_empty() {
                continue;
            }
            builder
                .apply(key, part)
                .map_err(|reason| FormatError::ValueParse {
                    row: entry.line,
                    column: key.name().to_string(),
                    token: part.to_string(),
                    reason,
                })?;
        }
    }

    let mut doc = builder.build()?;
    doc.findings = findings;
    Ok(doc)
}

fn format_trajectory(points: &[TrajectoryPoint]) -> String {
    points
        .iter()
        .map(|p| {
            format!(
                "({}, {}, {})",
                format_decimal(p.x),
                format_decimal(p.y),
                format_decimal(p.t)
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn format_field(key: Key, doc: &MetadataDocument) -> Option<String> {
    let m = &doc.metadata;
    let q = |v: Option<Decimal>, units: UnitTable| v.map(|v| format_quantity(v, units));
    match key {
        Key::Institution => doc.institution.clone(),
        Key::CampaignId => doc.campaign_id.clone(),
        Key::MapRef => doc.map_ref.clone(),
        Key::Env => Some(m.env.to_string()),
        Key::AzRes => q(m.az_res_deg, text::DEG),
        Key::ElRes => q(m.el_res_deg, text::DEG),
        Key::Mobility => m.mobility.map(|mob| format!("{mob:?}")),
        Key::Speed => q(m.speed_mps, text::MPS),
        Key::Trajectory => (!m.trajectory.is_empty()).then(|| format_trajectory(&m.trajectory)),
        Key::Fc => Some(format!(
            "{} ({})",
            format_quantity(m.fc.ghz, text::GHZ),
            m.fc.kind.as_str()
        )),
        Key::Bw => q(m.bw_ghz, text::GHZ),
        Key::PtxAvg => q(m.ptx_avg_dbm, text::DBM),
        Key::DrMax => q(m.dr_max_db, text::DB),
        Key::Nf => q(m.nf_db, text::DB),
        Key::RxSens => q(m.rx_sens_dbm, text::DBM),
        Key::TPdp => m.t_pdp.as_ref().map(|t| t.text().to_string()),
        Key::TPas => m.t_pas.as_ref().map(|t| t.text().to_string()),
        Key::TauMax => q(m.tau_max_ns, text::NS),
        Key::FRep => m
            .f_rep
            .as_ref()
            .map(|f| format!("{} {}", format_decimal(f.value), f.unit)),
        Key::Waveform => m.waveform.as_ref().map(|w| w.text().to_string()),
        Key::DtS => q(m.dt_s_ns, text::NS),
        Key::Fs => q(m.fs_msps, text::MSPS),
        Key::Sync => m.sync.as_ref().map(|s| s.text().to_string()),
        Key::SweepFd => m.sweep_fd.as_ref().map(|s| s.text().to_string()),
        Key::AsDef => m.as_def.map(|a| a.to_string()),
        Key::AntModel => m.ant_model.clone(),
        Key::FAntOp => m.f_ant_op_band.clone(),
        Key::AntType => m.ant_type.as_ref().map(|a| match &a.subtype {
            Some(sub) => format!("{sub} {}", a.kind.as_str()),
            None => a.kind.as_str().to_string(),
        }),
        Key::BwAnt => q(m.bw_ant_ghz, text::GHZ),
        Key::GTx => q(m.g_tx_dbi, text::DBI),
        Key::GRx => q(m.g_rx_dbi, text::DBI),
        Key::HpbwTx => q(m.hpbw_tx_deg, text::DEG),
        Key::HpbwRx => q(m.hpbw_rx_deg, text::DEG),
        Key::Sll => q(m.sll_db, text::DB),
        Key::Fbr => q(m.fbr_db, text::DB),
        Key::Xpd => q(m.xpd_db, text::DB),
        Key::Pol => m.pol.map(|p| p.as_str().to_string()),
        Key::ArrayGeometry => m.array_geometry.map(|g| match g.spacing_mm {
            Some(s) => format!("{}; {}", g.kind.as_str(), format_quantity(s, text::MM)),
            None => g.kind.as_str().to_string(),
        }),
        Key::NElements => m.n_elements.map(|n| n.to_string()),
        Key::PlKind => m.pl_kind.clone(),
    }
}

pub(super) fn entries_from_document(
    doc: &MetadataDocument,
    dialect: &FormatDialect,
    emit_missing: bool,
) -> Vec<(String, String)> {
    KEYS.iter()
        .filter_map(|(key, name)| match format_field(*key, doc) {
            Some(v) => Some((name.to_string(), v)),
            None if emit_missing => Some((name.to_string(), dialect.missing_token().to_string())),
            None => None,
        })
        .collect()
}
