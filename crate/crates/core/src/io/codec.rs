use serde_json::{Map, Value};

use super::metadata::Entry;
use super::{decode_utf8, points, FormatDialect, FormatError, FormatKind, Result};
use crate::model::{PointRecord, PooledDataset};

/// One serialization format for point tables and metadata documents.
pub trait TableCodec: Send + Sync {
    fn kind(&self) -> FormatKind;

    fn parse_points(&self, bytes: &[u8], dialect: &FormatDialect) -> Result<Vec<PointRecord>>;

    fn write_points(&self, points: &[PointRecord], dialect: &FormatDialect) -> Vec<u8>;

    fn parse_pooled(
        &self,
        bytes: &[u8],
        dialect: &FormatDialect,
    ) -> Result<Vec<(PointRecord, String)>>;

    fn write_pooled(&self, pool: &PooledDataset, dialect: &FormatDialect) -> Vec<u8>;

    /// Splits a metadata document into key/value entries.
    fn read_entries(&self, bytes: &[u8], dialect: &FormatDialect) -> Result<Vec<Entry>>;

    fn write_entries(&self, entries: &[(String, String)]) -> Vec<u8>;
}

fn with_provenance(rows: Vec<(PointRecord, Option<String>)>) -> Vec<(PointRecord, String)> {
    rows.into_iter()
        .map(|(p, prov)| (p, prov.expect("pooled rows always carry provenance")))
        .collect()
}

fn pooled_rows(pool: &PooledDataset) -> impl Iterator<Item = (&PointRecord, Option<&str>)> {
    pool.points()
        .map(|pp| (pp.point, Some(pp.provenance.campaign_id.as_str())))
}

/// Canonical CSV: header row, units row, data rows. Metadata is a headerless
/// two-column `key,value` list.
#[derive(Debug, Clone, Copy, Default)]
pub struct CsvCodec;

impl TableCodec for CsvCodec {
    fn kind(&self) -> FormatKind {
        FormatKind::CanonicalCsv
    }

    fn parse_points(&self, bytes: &[u8], dialect: &FormatDialect) -> Result<Vec<PointRecord>> {
        Ok(points::parse_csv(bytes, dialect, false)?
            .into_iter()
            .map(|(p, _)| p)
            .collect())
    }

    fn write_points(&self, pts: &[PointRecord], _dialect: &FormatDialect) -> Vec<u8> {
        points::write_csv(pts.iter().map(|p| (p, None)), false)
    }

    fn parse_pooled(
        &self,
        bytes: &[u8],
        dialect: &FormatDialect,
    ) -> Result<Vec<(PointRecord, String)>> {
        points::parse_csv(bytes, dialect, true).map(with_provenance)
    }

    fn write_pooled(&self, pool: &PooledDataset, _dialect: &FormatDialect) -> Vec<u8> {
        points::write_csv(pooled_rows(pool), true)
    }

    fn read_entries(&self, bytes: &[u8], dialect: &FormatDialect) -> Result<Vec<Entry>> {
        let text = decode_utf8(bytes)?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| FormatError::Malformed(e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.iter().all(str::is_empty) {
                continue;
            }
            if i == 0 && record.len() == 2 && &record[0] == "key" && &record[1] == "value" {
                continue;
            }
            let value = match record.len() {
                2 => record[1].to_string(),
                1 if !dialect.is_strict() => String::new(),
                n => {
                    return Err(FormatError::Malformed(format!(
                        "line {line}: expected key,value but found {n} fields"
                    )))
                }
            };
            entries.push(Entry {
                line,
                key: record[0].to_string(),
                value: Some(value),
            });
        }
        Ok(entries)
    }

    fn write_entries(&self, entries: &[(String, String)]) -> Vec<u8> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        for (k, v) in entries {
            writer.write_record([k, v]).expect("write to memory");
        }
        writer.into_inner().expect("flush to memory")
    }
}

/// Canonical JSON: `{"format", "version", "points": [...]}` for tables and a
/// flat object of string values for metadata.
#[derive(Debug, Clone, Copy, Default)]
pub struct JsonCodec;

impl TableCodec for JsonCodec {
    fn kind(&self) -> FormatKind {
        FormatKind::CanonicalJson
    }

    fn parse_points(&self, bytes: &[u8], dialect: &FormatDialect) -> Result<Vec<PointRecord>> {
        Ok(points::parse_json(bytes, dialect, false)?
            .into_iter()
            .map(|(p, _)| p)
            .collect())
    }

    fn write_points(&self, pts: &[PointRecord], dialect: &FormatDialect) -> Vec<u8> {
        points::write_json(pts.iter().map(|p| (p, None)), dialect)
    }

    fn parse_pooled(
        &self,
        bytes: &[u8],
        dialect: &FormatDialect,
    ) -> Result<Vec<(PointRecord, String)>> {
        points::parse_json(bytes, dialect, true).map(with_provenance)
    }

    fn write_pooled(&self, pool: &PooledDataset, dialect: &FormatDialect) -> Vec<u8> {
        points::write_json(pooled_rows(pool), dialect)
    }

    fn read_entries(&self, bytes: &[u8], _dialect: &FormatDialect) -> Result<Vec<Entry>> {
        let text = decode_utf8(bytes)?;
        let doc: Value =
            serde_json::from_str(text).map_err(|e| FormatError::Malformed(e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| FormatError::Malformed("metadata must be a JSON object".into()))?;
        obj.iter()
            .enumerate()
            .map(|(i, (key, value))| {
                let value = match value {
                    Value::Null => None,
                    Value::String(s) => Some(s.clone()),
                    Value::Number(n) => Some(n.to_string()),
                    Value::Bool(b) => Some(b.to_string()),
                    other => {
                        return Err(FormatError::ValueParse {
                            row: i + 1,
                            column: key.clone(),
                            token: other.to_string(),
                            reason: "metadata values must be strings".into(),
                        })
                    }
                };
                Ok(Entry {
                    line: i + 1,
                    key: key.clone(),
                    value,
                })
            })
            .collect()
    }

    fn write_entries(&self, entries: &[(String, String)]) -> Vec<u8> {
        let obj: Map<String, Value> = entries
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let mut bytes =
            serde_json::to_vec_pretty(&Value::Object(obj)).expect("serialize to memory");
        bytes.push(b'\n');
        bytes
    }
}
