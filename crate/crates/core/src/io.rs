//! File formats: binary matrices, model manifests, and CSV result tables.
//!
//! The binary matrix format ("RGM") is deliberately minimal — a 21-byte
//! header (magic `RGM1`, one dtype byte, row and column counts as
//! little-endian u64) followed by the row-major payload — so any language
//! can read it and 64-bit round trips are bit-exact.  Manifests are JSON;
//! result tables are CSV with floats written at full precision.
//!
//! All file writes go through a temp-file-plus-rename so interrupted runs
//! never leave half-written outputs.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::{Path, PathBuf};

pub const RGM_MAGIC: [u8; 4] = *b"RGM1";
pub const RGM_HEADER_LEN: usize = 21;

/// Payload element width of a binary matrix file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RgmDtype {
    /// 32-bit floats; reads upcast to f64, writes truncate precision.
    F32,
    /// 64-bit floats; round trips are bit-exact.
    F64,
}

impl RgmDtype {
    fn byte(self) -> u8 {
        match self {
            RgmDtype::F32 => 0,
            RgmDtype::F64 => 1,
        }
    }

    fn width(self) -> usize {
        match self {
            RgmDtype::F32 => 4,
            RgmDtype::F64 => 8,
        }
    }
}

/// Serialize a matrix to the binary format.  Fails on non-finite values.
pub fn encode_matrix(m: &Matrix, dtype: RgmDtype) -> Result<Vec<u8>> {
    m.validate_finite()?;
    let mut out = Vec::with_capacity(RGM_HEADER_LEN + m.data().len() * dtype.width());
    out.extend_from_slice(&RGM_MAGIC);
    out.push(dtype.byte());
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    match dtype {
        RgmDtype::F32 => {
            for &v in m.data() {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        RgmDtype::F64 => {
            for &v in m.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    Ok(out)
}

/// Parse a matrix from the binary format, upcasting 32-bit payloads.
pub fn decode_matrix(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < RGM_HEADER_LEN {
        return Err(Error::TruncatedPayload(format!(
            "file is {} bytes; the header alone needs {RGM_HEADER_LEN}",
            bytes.len()
        )));
    }
    if bytes[..4] != RGM_MAGIC {
        return Err(Error::BadMagic(format!(
            "expected magic {:?}, found {:?}",
            String::from_utf8_lossy(&RGM_MAGIC),
            String::from_utf8_lossy(&bytes[..4])
        )));
    }
    let dtype = match bytes[4] {
        0 => RgmDtype::F32,
        1 => RgmDtype::F64,
        other => {
            return Err(Error::BadMagic(format!(
                "unknown dtype byte {other} (expected 0 for f32 or 1 for f64)"
            )))
        }
    };
    let rows = u64::from_le_bytes(bytes[5..13].try_into().expect("8 bytes")) as usize;
    let cols = u64::from_le_bytes(bytes[13..21].try_into().expect("8 bytes")) as usize;
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::InvalidShape(format!("{rows}x{cols} overflows")))?;
    let need = count
        .checked_mul(dtype.width())
        .ok_or_else(|| Error::InvalidShape(format!("{rows}x{cols} payload overflows")))?;
    let payload = &bytes[RGM_HEADER_LEN..];
    if payload.len() < need {
        return Err(Error::TruncatedPayload(format!(
            "payload has {} of {need} bytes for a {rows}x{cols} matrix",
            payload.len()
        )));
    }
    if payload.len() > need {
        return Err(Error::InvalidShape(format!(
            "{} trailing bytes after a {rows}x{cols} payload",
            payload.len() - need
        )));
    }
    let mut data = Vec::with_capacity(count);
    match dtype {
        RgmDtype::F32 => {
            for chunk in payload.chunks_exact(4) {
                data.push(f32::from_le_bytes(chunk.try_into().expect("4 bytes")) as f64);
            }
        }
        RgmDtype::F64 => {
            for chunk in payload.chunks_exact(8) {
                data.push(f64::from_le_bytes(chunk.try_into().expect("8 bytes")));
            }
        }
    }
    let m = Matrix::new(rows, cols, data)?;
    m.validate_finite()?;
    Ok(m)
}

/// Attach the offending path to a bare I/O error, keeping messages
/// single-line and actionable.
fn with_path<T>(r: std::io::Result<T>, path: &Path) -> Result<T> {
    r.map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Write bytes to `path` via a sibling temp file and an atomic rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("path {path:?} has no file name")))?;
    let mut tmp = PathBuf::from(dir.unwrap_or(Path::new(".")));
    tmp.push(format!(
        ".{}.tmp.{}",
        file_name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = with_path(std::fs::File::create(&tmp), &tmp)?;
        with_path(f.write_all(bytes), &tmp)?;
        with_path(f.sync_all(), &tmp)?;
    }
    with_path(std::fs::rename(&tmp, path), path)?;
    Ok(())
}

/// Write a matrix file (atomically).
pub fn write_matrix(m: &Matrix, path: &Path, dtype: RgmDtype) -> Result<()> {
    atomic_write(path, &encode_matrix(m, dtype)?)
}

/// Read a matrix file.
pub fn read_matrix(path: &Path) -> Result<Matrix> {
    decode_matrix(&with_path(std::fs::read(path), path)?)
}

/// Read a matrix from either format by extension: `.csv` parses an
/// all-numeric table (header row optional), anything else is binary.
pub fn read_matrix_auto(path: &Path) -> Result<Matrix> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        matrix_from_csv(&with_path(std::fs::read_to_string(path), path)?)
    } else {
        read_matrix(path)
    }
}

/// Parse an all-numeric CSV into a matrix.  A first row that fails to
/// parse as numbers is treated as a header and skipped.
pub fn matrix_from_csv(text: &str) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::TableError(format!("row {i}: {e}")))?;
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(vals) => rows.push(vals),
            Err(_) if i == 0 => continue, // header row
            Err(_) => {
                return Err(Error::TableError(format!(
                    "row {i} contains non-numeric fields"
                )))
            }
        }
    }
    let m = Matrix::from_rows(&rows)?;
    m.validate_finite()?;
    Ok(m)
}

// ---------------------------------------------------------------------------
// Model manifests
// ---------------------------------------------------------------------------

/// One model's metadata and the location of its embedding matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub name: String,
    #[serde(default)]
    pub family: String,
    /// Fraction in `[0,1]`; values above 1 in the file are read as
    /// percentages and divided by 100.
    #[serde(default)]
    pub accuracy: Option<f64>,
    pub embedding_path: String,
    /// Parameter count in millions, if known.
    #[serde(default)]
    pub params_m: Option<f64>,
    #[serde(default)]
    pub pretrain_dataset: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelManifest {
    pub models: Vec<ModelEntry>,
}

impl ModelManifest {
    pub fn entry(&self, name: &str) -> Option<&ModelEntry> {
        self.models.iter().find(|m| m.name == name)
    }
}

/// Parse and validate a manifest.  With a base directory, relative
/// embedding paths are resolved against it and must exist.
pub fn manifest_from_json(text: &str, base_dir: Option<&Path>) -> Result<ModelManifest> {
    let mut manifest: ModelManifest = serde_json::from_str(text)
        .map_err(|e| Error::ManifestError(format!("malformed manifest: {e}")))?;
    if manifest.models.is_empty() {
        return Err(Error::ManifestError("manifest lists no models".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for entry in &mut manifest.models {
        if entry.name.is_empty() {
            return Err(Error::ManifestError("a model entry has an empty name".into()));
        }
        if !seen.insert(entry.name.clone()) {
            return Err(Error::ManifestError(format!(
                "duplicate model name '{}'",
                entry.name
            )));
        }
        if entry.embedding_path.is_empty() {
            return Err(Error::ManifestError(format!(
                "model '{}': empty embedding_path",
                entry.name
            )));
        }
        if let Some(acc) = entry.accuracy {
            if !acc.is_finite() || acc < 0.0 {
                return Err(Error::ManifestError(format!(
                    "model '{}': accuracy {acc} is not a valid fraction or percentage",
                    entry.name
                )));
            }
            let normalized = if acc > 1.0 { acc / 100.0 } else { acc };
            if normalized > 1.0 {
                return Err(Error::ManifestError(format!(
                    "model '{}': accuracy {acc} exceeds 100%",
                    entry.name
                )));
            }
            entry.accuracy = Some(normalized);
        }
        if let Some(base) = base_dir {
            let resolved = if Path::new(&entry.embedding_path).is_absolute() {
                PathBuf::from(&entry.embedding_path)
            } else {
                base.join(&entry.embedding_path)
            };
            if !resolved.is_file() {
                return Err(Error::ManifestError(format!(
                    "model '{}': embedding_path {:?} does not exist",
                    entry.name, resolved
                )));
            }
            entry.embedding_path = resolved.to_string_lossy().into_owned();
        }
    }
    Ok(manifest)
}

/// Load a manifest file, resolving embedding paths against its directory.
pub fn load_manifest(path: &Path) -> Result<ModelManifest> {
    let text = with_path(std::fs::read_to_string(path), path)?;
    let base = path.parent().filter(|p| !p.as_os_str().is_empty());
    manifest_from_json(&text, Some(base.unwrap_or(Path::new("."))))
}

/// Serialize a manifest (pretty JSON) to a file, atomically.
pub fn write_manifest(manifest: &ModelManifest, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::ManifestError(e.to_string()))?;
    atomic_write(path, text.as_bytes())
}

// ---------------------------------------------------------------------------
// Result tables
// ---------------------------------------------------------------------------

/// One table cell: a string or a float.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Float(f64),
}

impl Cell {
    pub fn as_float(&self) -> Option<f64> {
        match self {
            Cell::Float(v) => Some(*v),
            Cell::Str(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Str(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Cell {
        Cell::Str(v)
    }
}

/// A rectangular table with a header row, written as CSV with floats at
/// full (17 significant digits) precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(headers: Vec<S>) -> Result<ResultTable> {
        let headers: Vec<String> = headers.into_iter().map(Into::into).collect();
        if headers.is_empty() {
            return Err(Error::TableError("a table needs at least one column".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for h in &headers {
            if !seen.insert(h.clone()) {
                return Err(Error::TableError(format!("duplicate column name '{h}'")));
            }
        }
        Ok(ResultTable { headers, rows: Vec::new() })
    }

    pub fn push_row(&mut self, cells: Vec<Cell>) -> Result<()> {
        if cells.len() != self.headers.len() {
            return Err(Error::TableError(format!(
                "row has {} cells for {} columns",
                cells.len(),
                self.headers.len()
            )));
        }
        self.rows.push(cells);
        Ok(())
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// All values of a float-typed column.
    pub fn float_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| Error::MissingField(format!("no column named '{name}'")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row[idx].as_float().ok_or_else(|| {
                    Error::TableError(format!("row {i}, column '{name}': not a number"))
                })
            })
            .collect()
    }

    /// All values of any column, as display strings.
    pub fn string_column(&self, name: &str) -> Result<Vec<String>> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| Error::MissingField(format!("no column named '{name}'")))?;
        Ok(self
            .rows
            .iter()
            .map(|row| match &row[idx] {
                Cell::Str(s) => s.clone(),
                Cell::Float(v) => fmt_float(*v),
            })
            .collect())
    }

    /// True when every cell of the column is a float.
    pub fn is_float_column(&self, idx: usize) -> bool {
        self.rows.iter().all(|row| matches!(row[idx], Cell::Float(_)))
    }
}

/// Full-precision float formatting: 17 significant digits round-trip any
/// finite f64 exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render a table as CSV text.
pub fn table_to_csv_string(table: &ResultTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(table.headers())
        .map_err(|e| Error::TableError(e.to_string()))?;
    for row in table.rows() {
        let fields: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Str(s) => s.clone(),
                Cell::Float(v) => fmt_float(*v),
            })
            .collect();
        w.write_record(&fields).map_err(|e| Error::TableError(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::TableError(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::TableError(e.to_string()))
}

/// Parse CSV text into a table.  A column whose every value parses as a
/// number is typed float; anything else stays a string column.
pub fn table_from_csv_str(text: &str) -> Result<ResultTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::TableError(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut raw_rows: Vec<Vec<String>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::TableError(format!("row {i}: {e}")))?;
        if record.len() != headers.len() {
            return Err(Error::TableError(format!(
                "row {i} has {} fields for {} columns",
                record.len(),
                headers.len()
            )));
        }
        raw_rows.push(record.iter().map(str::to_string).collect());
    }
    let mut float_col = vec![true; headers.len()];
    for row in &raw_rows {
        for (j, field) in row.iter().enumerate() {
            if float_col[j] && field.trim().parse::<f64>().is_err() {
                float_col[j] = false;
            }
        }
    }
    let mut table = ResultTable::new(headers)?;
    for row in raw_rows {
        let cells: Vec<Cell> = row
            .into_iter()
            .enumerate()
            .map(|(j, field)| {
                if float_col[j] {
                    Cell::Float(field.trim().parse::<f64>().expect("checked"))
                } else {
                    Cell::Str(field)
                }
            })
            .collect();
        table.push_row(cells)?;
    }
    Ok(table)
}

/// Write a table as CSV, atomically.
pub fn write_table(table: &ResultTable, path: &Path) -> Result<()> {
    atomic_write(path, table_to_csv_string(table)?.as_bytes())
}

/// Read a CSV table.
pub fn read_table(path: &Path) -> Result<ResultTable> {
    table_from_csv_str(&with_path(std::fs::read_to_string(path), path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Matrix {
        Matrix::new(3, 2, vec![1.0, -2.5, 1e-300, 3.25, f64::MIN_POSITIVE, 0.1]).unwrap()
    }

    #[test]
    fn f64_round_trip_is_bit_exact() {
        let m = sample();
        let bytes = encode_matrix(&m, RgmDtype::F64).unwrap();
        let back = decode_matrix(&bytes).unwrap();
        let a: Vec<u64> = m.data().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = back.data().iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn header_layout_matches_the_format() {
        let m = Matrix::new(2, 3, vec![0.0; 6]).unwrap();
        let bytes = encode_matrix(&m, RgmDtype::F32).unwrap();
        assert_eq!(&bytes[..4], b"RGM1");
        assert_eq!(bytes[4], 0x00);
        assert_eq!(&bytes[5..13], &2u64.to_le_bytes());
        assert_eq!(&bytes[13..21], &3u64.to_le_bytes());
        assert_eq!(bytes.len(), 21 + 6 * 4);
    }

    #[test]
    fn f32_reads_upcast() {
        let m = Matrix::new(1, 2, vec![1.5, -0.25]).unwrap(); // f32-exact values
        let bytes = encode_matrix(&m, RgmDtype::F32).unwrap();
        let back = decode_matrix(&bytes).unwrap();
        assert_eq!(back.data(), &[1.5, -0.25]);
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let m = sample();
        let mut bytes = encode_matrix(&m, RgmDtype::F64).unwrap();
        bytes[3] = b'X';
        assert!(matches!(decode_matrix(&bytes), Err(Error::BadMagic(_))));
    }

    #[test]
    fn unknown_dtype_is_rejected() {
        let m = sample();
        let mut bytes = encode_matrix(&m, RgmDtype::F64).unwrap();
        bytes[4] = 7;
        assert!(matches!(decode_matrix(&bytes), Err(Error::BadMagic(_))));
    }

    #[test]
    fn short_payload_is_truncated() {
        let m = sample();
        let mut bytes = encode_matrix(&m, RgmDtype::F64).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(matches!(decode_matrix(&bytes), Err(Error::TruncatedPayload(_))));
        assert!(matches!(decode_matrix(&bytes[..10]), Err(Error::TruncatedPayload(_))));
    }

    #[test]
    fn non_finite_payload_reports_position() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"RGM1");
        bytes.push(1);
        bytes.extend_from_slice(&1u64.to_le_bytes());
        bytes.extend_from_slice(&2u64.to_le_bytes());
        bytes.extend_from_slice(&1.0f64.to_le_bytes());
        bytes.extend_from_slice(&f64::INFINITY.to_le_bytes());
        let err = decode_matrix(&bytes).unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue(_)));
        assert!(err.to_string().contains("column 1"), "{err}");
    }

    #[test]
    fn file_round_trip_via_temp_dir() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.rgm");
        let m = sample();
        write_matrix(&m, &path, RgmDtype::F64).unwrap();
        assert_eq!(read_matrix(&path).unwrap(), m);
        // No stray temp files left behind.
        let leftovers: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().contains(".tmp."))
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn csv_matrix_import_with_and_without_header() {
        let with_header = "a,b\n1.0,2.0\n3.0,4.0\n";
        let m = matrix_from_csv(with_header).unwrap();
        assert_eq!(m.data(), &[1.0, 2.0, 3.0, 4.0]);
        let without = "1.0,2.0\n3.0,4.0\n";
        assert_eq!(matrix_from_csv(without).unwrap(), m);
    }

    // --- manifests -------------------------------------------------------

    fn manifest_json() -> String {
        r#"{
            "models": [
                {"name": "resnet", "family": "cnn", "accuracy": 87.8,
                 "embedding_path": "resnet.rgm", "params_m": 25.6,
                 "pretrain_dataset": "in1k"},
                {"name": "vit", "family": "transformer", "accuracy": 0.812,
                 "embedding_path": "vit.rgm"}
            ]
        }"#
        .to_string()
    }

    #[test]
    fn accuracy_percentages_normalize_on_load() {
        let m = manifest_from_json(&manifest_json(), None).unwrap();
        assert_eq!(m.models[0].accuracy, Some(0.878));
        assert_eq!(m.models[1].accuracy, Some(0.812));
        assert_eq!(m.models[1].family, "transformer");
    }

    #[test]
    fn duplicate_names_fail() {
        let text = r#"{"models": [
            {"name": "m", "embedding_path": "a.rgm"},
            {"name": "m", "embedding_path": "b.rgm"}
        ]}"#;
        assert!(matches!(
            manifest_from_json(text, None),
            Err(Error::ManifestError(_))
        ));
    }

    #[test]
    fn missing_embedding_files_fail_at_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("zoo.json");
        std::fs::write(&path, manifest_json()).unwrap();
        let err = load_manifest(&path).unwrap_err();
        assert!(matches!(err, Error::ManifestError(_)));
        assert!(err.to_string().contains("resnet"), "{err}");

        // Create the referenced files; the load then succeeds with
        // resolved absolute paths.
        let m = Matrix::new(2, 2, vec![0.0; 4]).unwrap();
        write_matrix(&m, &dir.path().join("resnet.rgm"), RgmDtype::F64).unwrap();
        write_matrix(&m, &dir.path().join("vit.rgm"), RgmDtype::F64).unwrap();
        let manifest = load_manifest(&path).unwrap();
        assert!(Path::new(&manifest.models[0].embedding_path).is_absolute());
    }

    // --- tables ----------------------------------------------------------

    #[test]
    fn table_round_trip_preserves_types_and_bits() {
        let mut t = ResultTable::new(vec!["model", "score"]).unwrap();
        t.push_row(vec!["a".into(), (1.0 / 3.0).into()]).unwrap();
        t.push_row(vec!["b".into(), (-2.5e-17).into()]).unwrap();
        let text = table_to_csv_string(&t).unwrap();
        let back = table_from_csv_str(&text).unwrap();
        assert_eq!(back, t);
        let col = back.float_column("score").unwrap();
        assert_eq!(col[0].to_bits(), (1.0f64 / 3.0).to_bits());
    }

    #[test]
    fn ragged_rows_and_duplicate_headers_fail() {
        let mut t = ResultTable::new(vec!["a", "b"]).unwrap();
        assert!(matches!(
            t.push_row(vec![Cell::Float(1.0)]),
            Err(Error::TableError(_))
        ));
        assert!(matches!(
            ResultTable::new(vec!["x", "x"]),
            Err(Error::TableError(_))
        ));
        assert!(matches!(
            table_from_csv_str("a,b\n1.0\n"),
            Err(Error::TableError(_))
        ));
    }

    #[test]
    fn missing_column_is_reported() {
        let t = ResultTable::new(vec!["a"]).unwrap();
        assert!(matches!(t.float_column("b"), Err(Error::MissingField(_))));
    }
}
