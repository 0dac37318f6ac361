//! IQ sample files.
//!
//! Two encodings, selected by file extension:
//! * binary (any extension but `.csv`): little-endian 64-bit float pairs
//!   `(real, imaginary)`, no header;
//! * `.csv`: two columns `real,imag`, one sample per line, optional header
//!   line `real,imag`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::{Error, Result};

/// Read IQ samples from `path`, choosing the decoder from the extension.
pub fn read_iq(path: &Path) -> Result<Vec<Complex64>> {
    if is_csv(path) {
        read_iq_csv(path)
    } else {
        read_iq_binary(path)
    }
}

/// Write IQ samples to `path`, choosing the encoder from the extension.
pub fn write_iq(path: &Path, samples: &[Complex64]) -> Result<()> {
    if is_csv(path) {
        write_iq_csv(path, samples)
    } else {
        write_iq_binary(path, samples)
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false)
}

fn read_iq_binary(path: &Path) -> Result<Vec<Complex64>> {
    let bytes = fs::read(path)?;
    if bytes.is_empty() {
        return Err(Error::Parse(format!("{}: empty IQ file", path.display())));
    }
    if !bytes.len().is_multiple_of(16) {
        return Err(Error::Parse(format!(
            "{}: length {} is not a whole number of float64 IQ pairs",
            path.display(),
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect())
}

fn write_iq_binary(path: &Path, samples: &[Complex64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(samples.len() * 16);
    for s in samples {
        bytes.extend_from_slice(&s.re.to_le_bytes());
        bytes.extend_from_slice(&s.im.to_le_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn read_iq_csv(path: &Path) -> Result<Vec<Complex64>> {
    let text = fs::read_to_string(path)?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.eq_ignore_ascii_case("real,imag") {
            continue;
        }
        let mut fields = line.split(',');
        let (re, im) = match (fields.next(), fields.next(), fields.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => {
                return Err(Error::Parse(format!(
                    "{}:{}: expected exactly two comma-separated fields",
                    path.display(),
                    lineno + 1
                )))
            }
        };
        let parse = |field: &str, what| {
            field.trim().parse::<f64>().map_err(|e| {
                Error::Parse(format!(
                    "{}:{}: bad {what} value '{}': {e}",
                    path.display(),
                    lineno + 1,
                    field.trim()
                ))
            })
        };
        samples.push(Complex64::new(parse(re, "real")?, parse(im, "imag")?));
    }
    if samples.is_empty() {
        return Err(Error::Parse(format!(
            "{}: no IQ samples found",
            path.display()
        )));
    }
    Ok(samples)
}

fn write_iq_csv(path: &Path, samples: &[Complex64]) -> Result<()> {
    let mut text = String::from("real,imag\n");
    for s in samples {
        text.push_str(&format!("{:e},{:e}\n", s.re, s.im));
    }
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("foe-io-test-{}-{name}", std::process::id()));
        p
    }

    fn samples() -> Vec<Complex64> {
        vec![
            Complex64::new(1.0, -2.0),
            Complex64::new(0.5, 0.25),
            Complex64::new(-3.25e9, 1e-12),
        ]
    }

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let path = tmp("roundtrip.iq");
        write_iq(&path, &samples()).unwrap();
        let back = read_iq(&path).unwrap();
        assert_eq!(back, samples());
        fs::remove_file(&path).ok();
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let path = tmp("roundtrip.csv");
        write_iq(&path, &samples()).unwrap();
        let back = read_iq(&path).unwrap();
        assert_eq!(back, samples());
        fs::remove_file(&path).ok();
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        let path = tmp("empty.iq");
        fs::write(&path, b"").unwrap();
        assert!(matches!(read_iq(&path), Err(Error::Parse(_))));
        fs::remove_file(&path).ok();
    }

    #[test]
    fn ragged_binary_is_a_parse_error() {
        let path = tmp("ragged.iq");
        fs::write(&path, vec![0u8; 24]).unwrap();
        assert!(matches!(read_iq(&path), Err(Error::Parse(_))));
        fs::remove_file(&path).ok();
    }

    #[test]
    fn bad_csv_field_is_a_parse_error() {
        let path = tmp("bad.csv");
        fs::write(&path, "1.0,2.0\noops,3.0\n").unwrap();
        let err = read_iq(&path).unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");
        fs::remove_file(&path).ok();
    }
}
