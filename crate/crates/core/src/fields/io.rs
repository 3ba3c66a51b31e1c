use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::field::{ScalarField, SymTensorField, VectorField};
use crate::error::Result;

/// 17 significant digits, locale-free.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
    }
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp: PathBuf = match dir {
        Some(d) => d.join(format!(".{name}.tmp{}", std::process::id())),
        None => PathBuf::from(format!(".{name}.tmp{}", std::process::id())),
    };
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// CSV table with a header row; float cells use 17 significant digits.
pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner()
        .map_err(|e| crate::error::Error::Io(e.to_string()))
}

fn columns_csv(names: &[String], cols: &[&Vec<f64>]) -> Result<Vec<u8>> {
    let header: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let n = cols.first().map(|c| c.len()).unwrap_or(0);
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| cols.iter().map(|c| fmt_f64(c[i])).collect())
        .collect();
    csv_bytes(&header, &rows)
}

/// One row per sample in storage order (x fastest).
pub fn scalar_csv(f: &ScalarField) -> Result<Vec<u8>> {
    columns_csv(&["value".to_string()], &[&f.values])
}

pub fn vector_csv(f: &VectorField) -> Result<Vec<u8>> {
    let names: Vec<String> = (0..f.ncomp()).map(|c| format!("v{}", c + 1)).collect();
    columns_csv(&names, &f.comps.iter().collect::<Vec<_>>())
}

pub fn tensor_csv(f: &SymTensorField) -> Result<Vec<u8>> {
    let names = ["t11", "t12", "t22"].map(String::from);
    columns_csv(&names, &f.entries.iter().collect::<Vec<_>>())
}

/// Little-endian f64 samples, components concatenated.
pub fn to_binary(comps: &[&Vec<f64>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(comps.iter().map(|c| c.len() * 8).sum());
    for c in comps {
        for x in c.iter() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

pub fn from_binary(bytes: &[u8]) -> Vec<f64> {
    bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::grid::Grid;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_is_x_fastest() {
        let g = Grid::periodic(2, 8, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x, y, _| x + 10.0 * y);
        let text = String::from_utf8(scalar_csv(&f).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "value");
        assert_eq!(lines[2].parse::<f64>().unwrap(), 0.125);
        assert_eq!(lines.len(), 65);
    }

    #[test]
    fn binary_and_atomic_write() {
        let v = vec![1.5, -2.0, 3.25];
        let b = to_binary(&[&v]);
        assert_eq!(from_binary(&b), v);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.bin");
        write_atomic(&p, &b).unwrap();
        assert_eq!(fs::read(&p).unwrap(), b);
        let leftovers = fs::read_dir(p.parent().unwrap()).unwrap().count();
        assert_eq!(leftovers, 1);
    }
}
