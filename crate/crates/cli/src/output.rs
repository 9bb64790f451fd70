//! Rendering of command results as text, JSON or CSV.
//!
//! CSV is derived from the JSON value so both carry the same numbers:
//! nested objects become dotted column names, arrays of scalars are joined
//! with `;`, and each array of objects (e.g. `lemmas`) contributes one row
//! per element, tagged by a leading `record` column. An element field whose
//! name clashes with a top-level column is written as `item.<name>`.

use serde_json::{Map, Value};

use crate::args::Format;

pub trait Report: serde::Serialize {
    fn text(&self) -> String;
}

pub fn render<R: Report>(report: &R, format: Format) -> Result<String, String> {
    match format {
        Format::Text => Ok(report.text()),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| e.to_string())?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let value = serde_json::to_value(report).map_err(|e| e.to_string())?;
            to_csv(&value)
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(|i| match i {
                Value::Array(inner) => inner.iter().map(scalar).collect::<Vec<_>>().join(" "),
                other => scalar(other),
            })
            .collect::<Vec<_>>()
            .join(";"),
        other => other.to_string(),
    }
}

fn is_object_array(v: &Value) -> bool {
    matches!(v, Value::Array(items) if !items.is_empty() && items.iter().all(Value::is_object))
}

fn flatten(prefix: &str, obj: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in obj {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Object(inner) => flatten(&key, inner, out),
            v if is_object_array(v) => {}
            other => out.push((key, scalar(other))),
        }
    }
}

fn to_csv(value: &Value) -> Result<String, String> {
    let Value::Object(top) = value else {
        return Err("report is not an object".into());
    };
    let mut common = Vec::new();
    flatten("", top, &mut common);
    let nested: Vec<(&String, &Vec<Value>)> = top
        .iter()
        .filter(|(_, v)| is_object_array(v))
        .filter_map(|(k, v)| v.as_array().map(|a| (k, a)))
        .collect();

    let mut rows: Vec<Vec<(String, String)>> = Vec::new();
    if nested.is_empty() {
        rows.push(common);
    } else {
        for (name, items) in nested {
            for item in items {
                let mut row = vec![("record".to_string(), name.clone())];
                row.extend(common.iter().cloned());
                if let Value::Object(o) = item {
                    let mut fields = Vec::new();
                    flatten("", o, &mut fields);
                    for (k, v) in fields {
                        if common.iter().any(|(c, _)| *c == k) {
                            row.push((format!("item.{k}"), v));
                        } else {
                            row.push((k, v));
                        }
                    }
                }
                rows.push(row);
            }
        }
    }

    let mut columns: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&columns).map_err(|e| e.to_string())?;
    for row in &rows {
        let record: Vec<&str> = columns
            .iter()
            .map(|c| {
                row.iter()
                    .find(|(k, _)| k == c)
                    .map_or("", |(_, v)| v.as_str())
            })
            .collect();
        w.write_record(&record).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flat_document() {
        let v = json!({"alpha": [1, 2], "p": "4", "z": {"lo": "1.5", "hi": "1.6"}});
        let csv = to_csv(&v).unwrap();
        assert_eq!(csv, "alpha,p,z.lo,z.hi\n1;2,4,1.5,1.6\n");
    }

    #[test]
    fn nested_records() {
        let v = json!({
            "status": "PASS",
            "lemmas": [{"id": "A", "checked": 3}, {"id": "B", "checked": 4}],
            "bounds": [{"alpha": [1], "exact_p": "1"}]
        });
        let csv = to_csv(&v).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "record,status,id,checked,alpha,exact_p");
        assert_eq!(lines[1], "lemmas,PASS,A,3,,");
        assert_eq!(lines[3], "bounds,PASS,,,1,1");
    }

    #[test]
    fn clashing_item_fields_are_prefixed() {
        let v = json!({"status": "FAIL", "lemmas": [{"id": "A", "status": "PASS"}]});
        let csv = to_csv(&v).unwrap();
        assert_eq!(csv, "record,status,id,item.status\nlemmas,FAIL,A,PASS\n");
    }
}
