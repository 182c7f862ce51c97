use serde_json::{Map, Number, Value};

use super::text::{format_decimal, parse_decimal};
use super::{decode_utf8, FormatDialect, FormatError, Result};
use crate::model::{Column, Decimal, LocCondition, PointFields, PointRecord};

/// Exact canonical CSV header.
pub const CANONICAL_HEADER: &str = "freq_ghz,tx,rx,loc,tr_sep_m,pl_db,mean_dir_ds_ns,omni_ds_ns,mean_lobe_asa_deg,omni_asa_deg,mean_lobe_asd_deg,omni_asd_deg,mean_lobe_zsa_deg,omni_zsa_deg,mean_lobe_zsd_deg,omni_zsd_deg";

/// Canonical units row written after the header.
pub const CANONICAL_UNITS: &str = "GHz,,,,m,dB,ns,ns,deg,deg,deg,deg,deg,deg,deg,deg";

/// Extra column appended to pooled tables.
pub const PROVENANCE_COLUMN: &str = "campaign_id";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Column(Column),
    Provenance,
}

impl Slot {
    fn name(self) -> &'static str {
        match self {
            Slot::Column(c) => c.name(),
            Slot::Provenance => PROVENANCE_COLUMN,
        }
    }
}

fn canonical_slots(pooled: bool) -> Vec<Slot> {
    let mut slots: Vec<Slot> = Column::ALL.into_iter().map(Slot::Column).collect();
    if pooled {
        slots.push(Slot::Provenance);
    }
    slots
}

/// Accumulates one row's cells into `PointFields`.
struct RowBuilder {
    fields: PointFields,
    provenance: Option<String>,
}

impl RowBuilder {
    fn new() -> Self {
        RowBuilder {
            fields: PointFields::zeroed(
                Decimal::ZERO,
                "",
                "",
                LocCondition::Los,
                Decimal::ZERO,
                Decimal::ZERO,
            ),
            provenance: None,
        }
    }

    fn set(&mut self, slot: Slot, token: &str, row: usize, missing_token: &str) -> Result<()> {
        let token = token.trim();
        let fail = |reason: &str| FormatError::ValueParse {
            row,
            column: slot.name().to_string(),
            token: token.to_string(),
            reason: reason.to_string(),
        };
        if token == missing_token || token.is_empty() {
            return Err(fail(
                "point rows must be complete; missing values are not allowed",
            ));
        }
        match slot {
            Slot::Provenance => self.provenance = Some(token.to_string()),
            Slot::Column(Column::Tx) => self.fields.tx_id = token.to_string(),
            Slot::Column(Column::Rx) => self.fields.rx_id = token.to_string(),
            Slot::Column(Column::Loc) => {
                self.fields.loc_condition = token.parse().map_err(|e: String| fail(&e))?;
            }
            Slot::Column(c) => {
                let value =
                    parse_decimal(token).ok_or_else(|| fail("expected a plain decimal number"))?;
                self.fields.set(c, value);
            }
        }
        Ok(())
    }

    fn finish(self, row: usize) -> Result<(PointRecord, Option<String>)> {
        let record = PointRecord::new(self.fields)
            .map_err(|source| FormatError::InvariantViolation { row, source })?;
        Ok((record, self.provenance))
    }
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_error(e: csv::Error) -> FormatError {
    FormatError::Malformed(e.to_string())
}

fn resolve_header(
    header: &csv::StringRecord,
    dialect: &FormatDialect,
    pooled: bool,
) -> Result<Vec<Slot>> {
    let expected = canonical_slots(pooled);
    if dialect.is_strict() {
        for i in 0..expected.len().max(header.len()) {
            let want = expected.get(i).map_or("", |s| s.name());
            let got = header.get(i).unwrap_or("");
            if want != got {
                return Err(FormatError::HeaderMismatch {
                    column: i + 1,
                    expected: want.to_string(),
                    found: got.to_string(),
                });
            }
        }
        return Ok(expected);
    }

    let mut slots = Vec::with_capacity(header.len());
    for (i, name) in header.iter().enumerate() {
        let slot = if pooled && name.eq_ignore_ascii_case(PROVENANCE_COLUMN) {
            Slot::Provenance
        } else {
            Slot::Column(
                Column::from_alias(name).ok_or_else(|| FormatError::HeaderMismatch {
                    column: i + 1,
                    expected: expected.get(i).map_or("", |s| s.name()).to_string(),
                    found: name.to_string(),
                })?,
            )
        };
        if slots.contains(&slot) {
            return Err(FormatError::HeaderMismatch {
                column: i + 1,
                expected: "a column not already present".to_string(),
                found: name.to_string(),
            });
        }
        slots.push(slot);
    }
    if let Some(absent) = expected.iter().find(|s| !slots.contains(s)) {
        return Err(FormatError::HeaderMismatch {
            column: slots.len() + 1,
            expected: absent.name().to_string(),
            found: String::new(),
        });
    }
    Ok(slots)
}

fn normalize_unit(cell: &str) -> String {
    let trimmed = cell
        .trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .trim();
    match trimmed {
        "°" | "degree" | "degrees" => "deg".to_string(),
        other => other.to_ascii_lowercase(),
    }
}

fn is_units_row(record: &csv::StringRecord, slots: &[Slot]) -> bool {
    let freq_at = slots
        .iter()
        .position(|s| *s == Slot::Column(Column::FreqGhz))
        .expect("freq column resolved");
    record
        .get(freq_at)
        .is_some_and(|cell| parse_decimal(cell).is_none())
}

fn check_units(record: &csv::StringRecord, slots: &[Slot]) -> Result<()> {
    for (i, slot) in slots.iter().enumerate() {
        let expected = match slot {
            Slot::Column(c) => c.unit(),
            Slot::Provenance => "",
        };
        let found = record.get(i).unwrap_or("");
        if normalize_unit(found) != expected.to_ascii_lowercase() {
            return Err(FormatError::UnitsMismatch {
                column: slot.name().to_string(),
                expected: expected.to_string(),
                found: found.to_string(),
            });
        }
    }
    Ok(())
}

pub(super) fn parse_csv(
    bytes: &[u8],
    dialect: &FormatDialect,
    pooled: bool,
) -> Result<Vec<(PointRecord, Option<String>)>> {
    let text = decode_utf8(bytes)?;
    let mut reader = csv_reader(text);
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r.map_err(csv_error)?,
        None => csv::StringRecord::new(),
    };
    let slots = resolve_header(&header, dialect, pooled)?;

    let mut out = Vec::new();
    let mut first = true;
    for record in records {
        let record = record.map_err(csv_error)?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            if is_units_row(&record, &slots) {
                check_units(&record, &slots)?;
                continue;
            }
        }
        if record.len() != slots.len() {
            return Err(FormatError::ValueParse {
                row,
                column: "<row>".to_string(),
                token: record.iter().collect::<Vec<_>>().join(","),
                reason: format!("expected {} fields, found {}", slots.len(), record.len()),
            });
        }
        let mut builder = RowBuilder::new();
        for (slot, cell) in slots.iter().zip(record.iter()) {
            builder.set(*slot, cell, row, dialect.missing_token())?;
        }
        out.push(builder.finish(row)?);
    }
    Ok(out)
}

fn row_cells(point: &PointRecord) -> Vec<String> {
    Column::ALL
        .into_iter()
        .map(|c| match c {
            Column::Tx => point.tx_id.clone(),
            Column::Rx => point.rx_id.clone(),
            Column::Loc => point.loc_condition.to_string(),
            numeric => format_decimal(point.value(numeric).expect("numeric column")),
        })
        .collect()
}

pub(super) fn write_csv<'a>(
    rows: impl Iterator<Item = (&'a PointRecord, Option<&'a str>)>,
    pooled: bool,
) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(false)
        .from_writer(Vec::new());
    let mut header: Vec<&str> = CANONICAL_HEADER.split(',').collect();
    let mut units: Vec<&str> = CANONICAL_UNITS.split(',').collect();
    if pooled {
        header.push(PROVENANCE_COLUMN);
        units.push("");
    }
    writer.write_record(&header).expect("write to memory");
    writer.write_record(&units).expect("write to memory");
    for (point, provenance) in rows {
        let mut cells = row_cells(point);
        if pooled {
            cells.push(provenance.unwrap_or_default().to_string());
        }
        writer.write_record(&cells).expect("write to memory");
    }
    writer.into_inner().expect("flush to memory")
}

fn decimal_number(value: Decimal) -> Value {
    Value::Number(
        format_decimal(value)
            .parse::<Number>()
            .expect("decimal text is a JSON number"),
    )
}

fn point_object(point: &PointRecord, provenance: Option<&str>) -> Value {
    let mut obj = Map::new();
    for c in Column::ALL {
        let v = match c {
            Column::Tx => Value::String(point.tx_id.clone()),
            Column::Rx => Value::String(point.rx_id.clone()),
            Column::Loc => Value::String(point.loc_condition.to_string()),
            numeric => decimal_number(point.value(numeric).expect("numeric column")),
        };
        obj.insert(c.name().to_string(), v);
    }
    if let Some(p) = provenance {
        obj.insert(PROVENANCE_COLUMN.to_string(), Value::String(p.to_string()));
    }
    Value::Object(obj)
}

pub(super) fn write_json<'a>(
    rows: impl Iterator<Item = (&'a PointRecord, Option<&'a str>)>,
    dialect: &FormatDialect,
) -> Vec<u8> {
    let points: Vec<Value> = rows.map(|(p, prov)| point_object(p, prov)).collect();
    let mut doc = Map::new();
    doc.insert("format".into(), Value::String("pointdata".into()));
    doc.insert(
        "version".into(),
        Value::String(dialect.version().to_string()),
    );
    doc.insert("points".into(), Value::Array(points));
    let mut bytes = serde_json::to_vec_pretty(&Value::Object(doc)).expect("serialize to memory");
    bytes.push(b'\n');
    bytes
}

fn json_token(value: &Value, strict: bool) -> Option<String> {
    match value {
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) if !strict => Some(s.clone()),
        _ => None,
    }
}

fn json_decimal(token: &str) -> Option<Decimal> {
    parse_decimal(token).or_else(|| {
        if token.contains(['e', 'E']) {
            Decimal::from_scientific(token).ok()
        } else {
            None
        }
    })
}

pub(super) fn parse_json(
    bytes: &[u8],
    dialect: &FormatDialect,
    pooled: bool,
) -> Result<Vec<(PointRecord, Option<String>)>> {
    let text = decode_utf8(bytes)?;
    let doc: Value =
        serde_json::from_str(text).map_err(|e| FormatError::Malformed(e.to_string()))?;
    let obj = doc.as_object().ok_or_else(|| {
        FormatError::Malformed("expected a JSON object with a points array".into())
    })?;
    match obj.get("version").and_then(Value::as_str) {
        Some(v) if v == dialect.version() => {}
        Some(v) => return Err(FormatError::UnsupportedVersion(v.to_string())),
        None => return Err(FormatError::Malformed("missing version".into())),
    }
    let points = obj
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| FormatError::Malformed("missing points array".into()))?;

    let strict = dialect.is_strict();
    let mut out = Vec::with_capacity(points.len());
    for (i, entry) in points.iter().enumerate() {
        let row = i + 1;
        let entry = entry
            .as_object()
            .ok_or_else(|| FormatError::Malformed(format!("point {row} is not an object")))?;
        let mut builder = RowBuilder::new();
        let mut seen: Vec<Slot> = Vec::new();
        for (key, value) in entry {
            let slot = if pooled && key == PROVENANCE_COLUMN {
                Slot::Provenance
            } else {
                let column = if strict {
                    Column::from_name(key)
                } else {
                    Column::from_alias(key)
                };
                match column {
                    Some(c) => Slot::Column(c),
                    None if strict => {
                        return Err(FormatError::ValueParse {
                            row,
                            column: key.clone(),
                            token: value.to_string(),
                            reason: "unknown point-data field".into(),
                        })
                    }
                    None => continue,
                }
            };
            let token = match slot {
                Slot::Column(c) if c.is_numeric() => json_token(value, strict),
                _ => value.as_str().map(str::to_string),
            }
            .ok_or_else(|| FormatError::ValueParse {
                row,
                column: slot.name().to_string(),
                token: value.to_string(),
                reason: "wrong JSON type".into(),
            })?;
            match slot {
                Slot::Column(c) if c.is_numeric() => {
                    let v = json_decimal(&token).ok_or_else(|| FormatError::ValueParse {
                        row,
                        column: c.name().to_string(),
                        token: token.clone(),
                        reason: "expected a decimal number".into(),
                    })?;
                    builder.fields.set(c, v);
                }
                _ => builder.set(slot, &token, row, dialect.missing_token())?,
            }
            seen.push(slot);
        }
        if let Some(absent) = canonical_slots(pooled)
            .into_iter()
            .find(|s| !seen.contains(s))
        {
            return Err(FormatError::ValueParse {
                row,
                column: absent.name().to_string(),
                token: String::new(),
                reason: "field missing".into(),
            });
        }
        out.push(builder.finish(row)?);
    }
    Ok(out)
}
