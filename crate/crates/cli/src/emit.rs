//! Writing tables and run metadata to disk.
//!
//! CSV numbers are written in positional notation with 17 significant digits, enough to
//! round-trip any `f64`. JSON numbers use the serializer's shortest round-trip form.
//! Undefined values are empty CSV cells or JSON `null`; infinities are `inf` / `-inf`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, Format};
use crate::run::{Cell, RunOutput, Table};

pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else if v == 0.0 {
        // drop the sign of -0
        "0".to_owned()
    } else {
        let sci = format!("{v:.16e}");
        let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).expect("exponent");
        let decimals = (16 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_number(*v),
        Cell::Int(n) => n.to_string(),
        Cell::Label(s) => (*s).to_owned(),
        Cell::Missing => String::new(),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Num(v) if v.is_finite() => json!(if *v == 0.0 { 0.0 } else { *v }),
        Cell::Num(v) => Value::String(format_number(*v)),
        Cell::Int(n) => json!(n),
        Cell::Label(s) => json!(s),
        Cell::Missing => Value::Null,
    }
}

pub fn write_csv<W: io::Write>(table: &Table, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell_text))?;
    }
    w.flush()?;
    Ok(())
}

pub fn table_json(table: &Table, out: &RunOutput) -> Value {
    let records: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table.columns.iter().cloned().zip(row.iter().map(cell_json)).collect();
            Value::Object(obj)
        })
        .collect();
    json!({
        "name": table.name,
        "columns": table.columns,
        "records": records,
        "metadata": { "scenario": out.scenario.name(), "rows": table.rows.len() },
    })
}

pub fn metadata_json(cfg: &ExperimentConfig, out: &RunOutput) -> Value {
    json!({
        "program": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "scenario": out.scenario.name(),
        "tables": out.tables.iter().map(|t| t.name.clone()).collect::<Vec<_>>(),
        "notes": out.notes,
        "config": cfg.to_json(),
    })
}

/// Write every table in each requested format plus `metadata.json`; returns the paths.
pub fn emit(cfg: &ExperimentConfig, out: &RunOutput, dir: &Path, formats: &[Format]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for table in &out.tables {
        for f in formats {
            let path = dir.join(format!("{}.{}", table.name, extension(*f)));
            match f {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(table, &mut buf).map_err(io::Error::other)?;
                    fs::write(&path, buf)?;
                }
                Format::Json => fs::write(&path, pretty(&table_json(table, out)))?,
            }
            written.push(path);
        }
    }
    let meta = dir.join("metadata.json");
    fs::write(&meta, pretty(&metadata_json(cfg, out)))?;
    written.push(meta);
    Ok(written)
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
