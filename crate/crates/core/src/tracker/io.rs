use std::io::{Read, Write};

use super::{DescriptorRow, DescriptorTable, TrackerError};

const ID_COLUMN: &str = "object_id";

/// Reads `slice,slot,<features…>[,object_id]` with a header row.
pub fn read_descriptors<R: Read>(source: R) -> Result<DescriptorTable, TrackerError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 || header[0] != "slice" || header[1] != "slot" {
        return Err(TrackerError::Parse {
            line: 1,
            message: "header must start with `slice,slot`".into(),
        });
    }
    let has_id = header.last().map(String::as_str) == Some(ID_COLUMN);
    let feature_end = header.len() - usize::from(has_id);
    let names = header[2..feature_end].to_vec();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let err = |message: String| TrackerError::Parse { line, message };
        if record.len() != header.len() {
            return Err(err(format!("expected {} fields, got {}", header.len(), record.len())));
        }
        let int = |s: &str| s.parse::<u32>().map_err(|e| err(format!("{s:?}: {e}")));
        let slice = int(&record[0])?;
        let slot = int(&record[1])?;
        let features = (2..feature_end)
            .map(|j| {
                record[j]
                    .parse::<f64>()
                    .map_err(|e| err(format!("{:?}: {e}", &record[j])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let object_id = if has_id {
            match &record[feature_end] {
                "" | "-1" => None,
                s => Some(int(s)?),
            }
        } else {
            None
        };
        rows.push(DescriptorRow {
            slice,
            slot,
            features,
            object_id,
        });
    }
    DescriptorTable::new(names, rows)
}

/// Writes the table; the id column is added when any row is labeled.
pub fn write_descriptors<W: Write>(table: &DescriptorTable, sink: W) -> Result<(), TrackerError> {
    let labeled = table.rows.iter().any(|r| r.object_id.is_some());
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec!["slice".to_string(), "slot".to_string()];
    header.extend(table.feature_names.iter().cloned());
    if labeled {
        header.push(ID_COLUMN.into());
    }
    w.write_record(&header)?;
    for r in &table.rows {
        let mut fields = vec![r.slice.to_string(), r.slot.to_string()];
        fields.extend(r.features.iter().map(|f| format!("{f:?}")));
        if labeled {
            fields.push(r.object_id.map_or("-1".into(), |id| id.to_string()));
        }
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}
