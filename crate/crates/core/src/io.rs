//! JSON documents for instances, Komlós instances and colorings.
//!
//! Floats are written in shortest round-trip form, so `read(write(x)) == x`
//! bit for bit. Every reader reports schema problems with a JSON path.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::coloring::Coloring;
use crate::error::{DiscError, Result};
use crate::instance::{Instance, NormModel};
use crate::komlos::KomlosInstance;
use crate::scalar::Scalar;

pub const INSTANCE_SCHEMA: &str = "disclab-instance-v1";
pub const KOMLOS_SCHEMA: &str = "disclab-komlos-v1";
pub const COLORING_SCHEMA: &str = "disclab-coloring-v1";

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> DiscError {
    DiscError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn matrix_value<'a, T: Scalar>(rows: impl Iterator<Item = &'a [T]>) -> Value {
    Value::Array(
        rows.map(|r| Value::Array(r.iter().map(|v| json!(v.wide())).collect()))
            .collect(),
    )
}

pub fn instance_to_value<T: Scalar>(instance: &Instance<T>) -> Value {
    json!({
        "schema": INSTANCE_SCHEMA,
        "model": instance.model(),
        "n": instance.n(),
        "m": instance.m(),
        "rows": matrix_value(instance.rows()),
    })
}

pub fn komlos_to_value<T: Scalar>(kom: &KomlosInstance<T>) -> Value {
    json!({
        "schema": KOMLOS_SCHEMA,
        "n": kom.n(),
        "m": kom.m(),
        "columns": matrix_value(kom.columns()),
    })
}

pub fn coloring_to_value(coloring: &Coloring) -> Value {
    json!({
        "schema": COLORING_SCHEMA,
        "values": coloring.values(),
    })
}

/// Compact JSON followed by a newline; the canonical on-disk form.
pub fn to_canonical_bytes(value: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(value).expect("Value always serializes");
    bytes.push(b'\n');
    bytes
}

/// SHA-256 of the canonical instance document, hex encoded.
pub fn instance_hash<T: Scalar>(instance: &Instance<T>) -> String {
    hex::encode(Sha256::digest(to_canonical_bytes(&instance_to_value(instance))))
}

pub fn komlos_hash<T: Scalar>(kom: &KomlosInstance<T>) -> String {
    hex::encode(Sha256::digest(to_canonical_bytes(&komlos_to_value(kom))))
}

/// Write through a sibling temporary file and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| DiscError::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

pub fn write_instance<T: Scalar>(path: &Path, instance: &Instance<T>) -> Result<()> {
    write_atomic(path, &to_canonical_bytes(&instance_to_value(instance)))
}

pub fn write_komlos<T: Scalar>(path: &Path, kom: &KomlosInstance<T>) -> Result<()> {
    write_atomic(path, &to_canonical_bytes(&komlos_to_value(kom)))
}

pub fn write_coloring(path: &Path, coloring: &Coloring) -> Result<()> {
    write_atomic(path, &to_canonical_bytes(&coloring_to_value(coloring)))
}

fn object(value: &Value) -> Result<&Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| schema_err("$", "expected a JSON object"))
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| schema_err(format!("$.{name}"), "missing field"))
}

fn check_schema(obj: &Map<String, Value>, expected: &str) -> Result<()> {
    match field(obj, "schema")?.as_str() {
        Some(s) if s == expected => Ok(()),
        Some(s) => Err(schema_err("$.schema", format!("expected {expected:?}, found {s:?}"))),
        None => Err(schema_err("$.schema", "expected a string")),
    }
}

fn usize_field(obj: &Map<String, Value>, name: &str) -> Result<usize> {
    field(obj, name)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| schema_err(format!("$.{name}"), "expected a non-negative integer"))
}

/// Parse a `outer x inner` numeric matrix, checking both dimensions.
fn matrix<T: Scalar>(obj: &Map<String, Value>, name: &str, outer: usize, inner: usize) -> Result<Vec<T>> {
    let rows = field(obj, name)?
        .as_array()
        .ok_or_else(|| schema_err(format!("$.{name}"), "expected an array"))?;
    if rows.len() != outer {
        return Err(schema_err(
            format!("$.{name}"),
            format!("expected {outer} entries, found {}", rows.len()),
        ));
    }
    let mut flat = Vec::with_capacity(outer * inner);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| schema_err(format!("$.{name}[{i}]"), "expected an array"))?;
        if row.len() != inner {
            return Err(schema_err(
                format!("$.{name}[{i}]"),
                format!("expected {inner} numbers, found {}", row.len()),
            ));
        }
        for (j, v) in row.iter().enumerate() {
            let x = v
                .as_f64()
                .ok_or_else(|| schema_err(format!("$.{name}[{i}][{j}]"), "expected a number"))?;
            flat.push(T::narrow(x));
        }
    }
    Ok(flat)
}

pub fn instance_from_value<T: Scalar>(value: &Value) -> Result<Instance<T>> {
    let obj = object(value)?;
    check_schema(obj, INSTANCE_SCHEMA)?;
    let model: NormModel =
        serde_json::from_value(field(obj, "model")?.clone()).map_err(|e| schema_err("$.model", e.to_string()))?;
    let n = usize_field(obj, "n")?;
    let m = usize_field(obj, "m")?;
    let entries = matrix(obj, "rows", m, n)?;
    Instance::from_row_major(model, m, n, entries)
}

pub fn komlos_from_value<T: Scalar>(value: &Value) -> Result<KomlosInstance<T>> {
    let obj = object(value)?;
    check_schema(obj, KOMLOS_SCHEMA)?;
    let n = usize_field(obj, "n")?;
    let m = usize_field(obj, "m")?;
    let columns = matrix(obj, "columns", n, m)?;
    KomlosInstance::from_column_major(n, m, columns)
}

pub fn coloring_from_value(value: &Value) -> Result<Coloring> {
    let obj = object(value)?;
    check_schema(obj, COLORING_SCHEMA)?;
    let values = field(obj, "values")?
        .as_array()
        .ok_or_else(|| schema_err("$.values", "expected an array"))?;
    let values = values
        .iter()
        .enumerate()
        .map(|(j, v)| match v.as_i64() {
            Some(x @ -1..=1) => Ok(x as i8),
            _ => Err(schema_err(format!("$.values[{j}]"), "expected -1, 0 or 1")),
        })
        .collect::<Result<Vec<_>>>()?;
    Coloring::new(values)
}

fn read_value(path: &Path) -> Result<Value> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

pub fn read_instance<T: Scalar>(path: &Path) -> Result<Instance<T>> {
    instance_from_value(&read_value(path)?)
}

pub fn read_komlos<T: Scalar>(path: &Path) -> Result<KomlosInstance<T>> {
    komlos_from_value(&read_value(path)?)
}

pub fn read_coloring(path: &Path) -> Result<Coloring> {
    coloring_from_value(&read_value(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family, GeneratorSpec};

    #[test]
    fn hadamard_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.json");
        let spec = GeneratorSpec {
            family: Family::Hadamard,
            n: 8,
            m: 8,
            seed: 0,
        };
        let inst = generate::<f64>(&spec).unwrap().into_rows().unwrap();
        write_instance(&p, &inst).unwrap();
        assert_eq!(read_instance::<f64>(&p).unwrap(), inst);
    }

    #[test]
    fn box_violation_names_the_cell() {
        let v = json!({"schema": INSTANCE_SCHEMA, "model": "BoxInf", "n": 2, "m": 1, "rows": [[0.5, 2.0]]});
        let err = instance_from_value::<f64>(&v).unwrap_err().to_string();
        assert!(err.contains("row 0, column 1"), "{err}");
    }

    #[test]
    fn missing_model_is_a_schema_error() {
        let v = json!({"schema": INSTANCE_SCHEMA, "n": 1, "m": 1, "rows": [[0.5]]});
        match instance_from_value::<f64>(&v) {
            Err(DiscError::Schema { path, .. }) => assert_eq!(path, "$.model"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_errors_carry_paths() {
        let v = json!({"schema": INSTANCE_SCHEMA, "model": "BoxInf", "n": 2, "m": 1, "rows": [[0.5, "x"]]});
        match instance_from_value::<f64>(&v) {
            Err(DiscError::Schema { path, .. }) => assert_eq!(path, "$.rows[0][1]"),
            other => panic!("{other:?}"),
        }
        let v = json!({"schema": KOMLOS_SCHEMA, "n": 2, "m": 1, "columns": [[0.5]]});
        assert!(komlos_from_value::<f64>(&v).is_err());
        let v = json!({"schema": COLORING_SCHEMA, "values": [1, 2]});
        match coloring_from_value(&v) {
            Err(DiscError::Schema { path, .. }) => assert_eq!(path, "$.values[1]"),
            other => panic!("{other:?}"),
        }
        let v = json!({"schema": "other", "values": []});
        assert!(coloring_from_value(&v).is_err());
    }

    #[test]
    fn hash_is_stable_and_content_sensitive() {
        let a = Instance::from_rows(NormModel::BoxInf, vec![vec![1.0, 0.5]]).unwrap();
        let b = Instance::from_rows(NormModel::BoxInf, vec![vec![1.0, 0.25]]).unwrap();
        assert_eq!(instance_hash(&a), instance_hash(&a.clone()));
        assert_ne!(instance_hash(&a), instance_hash(&b));
        assert_eq!(instance_hash(&a).len(), 64);
    }
}
