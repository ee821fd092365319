//! Touchstone 1.1 one- and two-port files.

use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TouchstoneError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unsupported port count {0}")]
    Ports(usize),
    #[error("expected {expected} values per frequency, got {got}")]
    Shape { expected: usize, got: usize },
}

/// Network data: per frequency, S parameters in Touchstone order
/// (`S11` for one port, `S11 S21 S12 S22` for two ports).
#[derive(Debug, Clone, PartialEq)]
pub struct Touchstone {
    pub ports: usize,
    pub reference_impedance: f64,
    pub frequencies: Vec<f64>,
    pub data: Vec<Vec<Complex64>>,
}

impl Touchstone {
    pub fn one_port(reference_impedance: f64, frequencies: Vec<f64>, s11: &[Complex64]) -> Self {
        Self {
            ports: 1,
            reference_impedance,
            frequencies,
            data: s11.iter().map(|s| vec![*s]).collect(),
        }
    }

    /// From full two-port matrices `[[S11, S12], [S21, S22]]`.
    pub fn two_port(
        reference_impedance: f64,
        frequencies: Vec<f64>,
        s: &[[[Complex64; 2]; 2]],
    ) -> Self {
        Self {
            ports: 2,
            reference_impedance,
            frequencies,
            data: s
                .iter()
                .map(|m| vec![m[0][0], m[1][0], m[0][1], m[1][1]])
                .collect(),
        }
    }

    /// Touchstone text in RI format with Hz units.
    pub fn write(&self, comment: &str) -> Result<String, TouchstoneError> {
        if !(1..=2).contains(&self.ports) {
            return Err(TouchstoneError::Ports(self.ports));
        }
        let per = self.ports * self.ports;
        let mut out = String::new();
        for line in comment.lines() {
            let _ = writeln!(out, "! {line}");
        }
        let _ = writeln!(
            out,
            "# Hz S RI R {}",
            format_reference(self.reference_impedance)
        );
        for (f, row) in self.frequencies.iter().zip(&self.data) {
            if row.len() != per {
                return Err(TouchstoneError::Shape {
                    expected: per,
                    got: row.len(),
                });
            }
            let _ = write!(out, "{f:.9e}");
            for s in row {
                let _ = write!(out, " {:.9e} {:.9e}", s.re, s.im);
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Parses Touchstone 1.1 text for `ports` ports (RI, MA or DB data).
    pub fn parse(text: &str, ports: usize) -> Result<Self, TouchstoneError> {
        if !(1..=2).contains(&ports) {
            return Err(TouchstoneError::Ports(ports));
        }
        let per = ports * ports;
        let mut unit = 1e9;
        let mut format = "MA".to_string();
        let mut zref = 50.0;
        let mut seen_option = false;
        let mut values: Vec<(usize, f64)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('!').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(opts) = line.strip_prefix('#') {
                if seen_option {
                    continue;
                }
                seen_option = true;
                let toks: Vec<String> = opts
                    .split_whitespace()
                    .map(|t| t.to_ascii_uppercase())
                    .collect();
                let mut k = 0;
                while k < toks.len() {
                    match toks[k].as_str() {
                        "HZ" => unit = 1.0,
                        "KHZ" => unit = 1e3,
                        "MHZ" => unit = 1e6,
                        "GHZ" => unit = 1e9,
                        "S" => {}
                        "RI" | "MA" | "DB" => format = toks[k].clone(),
                        "R" => {
                            k += 1;
                            zref = toks.get(k).and_then(|t| t.parse().ok()).ok_or(
                                TouchstoneError::Parse {
                                    line: n + 1,
                                    reason: "missing reference impedance".into(),
                                },
                            )?;
                        }
                        other => {
                            return Err(TouchstoneError::Parse {
                                line: n + 1,
                                reason: format!("unsupported option `{other}`"),
                            })
                        }
                    }
                    k += 1;
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| TouchstoneError::Parse {
                    line: n + 1,
                    reason: format!("not a number: `{tok}`"),
                })?;
                values.push((n + 1, v));
            }
        }
        let stride = 1 + 2 * per;
        if !values.len().is_multiple_of(stride) {
            return Err(TouchstoneError::Parse {
                line: values.last().map_or(0, |v| v.0),
                reason: format!("value count {} is not a multiple of {stride}", values.len()),
            });
        }
        let mut frequencies = Vec::new();
        let mut data = Vec::new();
        for rec in values.chunks(stride) {
            frequencies.push(rec[0].1 * unit);
            let row = (0..per)
                .map(|k| {
                    let (a, b) = (rec[1 + 2 * k].1, rec[2 + 2 * k].1);
                    match format.as_str() {
                        "RI" => Complex64::new(a, b),
                        "MA" => Complex64::from_polar(a, b.to_radians()),
                        _ => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
                    }
                })
                .collect();
            data.push(row);
        }
        Ok(Self {
            ports,
            reference_impedance: zref,
            frequencies,
            data,
        })
    }
}

fn format_reference(z: f64) -> String {
    if z.fract() == 0.0 && z.abs() < 1e12 {
        format!("{}", z as i64)
    } else {
        format!("{z}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_port_round_trip() {
        let f = vec![1e8, 2e8];
        let s = [Complex64::new(-0.5, 0.25), Complex64::new(0.125, -1e-7)];
        let t = Touchstone::one_port(50.0, f, &s);
        let text = t.write("test").unwrap();
        assert!(text.contains("# Hz S RI R 50\n"));
        let back = Touchstone::parse(&text, 1).unwrap();
        assert_eq!(back.frequencies, t.frequencies);
        for (a, b) in back.data.iter().zip(&t.data) {
            assert!((a[0] - b[0]).norm() <= 1e-9 * b[0].norm());
        }
    }

    #[test]
    fn parses_ma_in_ghz() {
        let t = Touchstone::parse("# GHz S MA R 75\n1.0 0.5 90\n", 1).unwrap();
        assert_eq!(t.frequencies, vec![1e9]);
        assert_eq!(t.reference_impedance, 75.0);
        assert!((t.data[0][0] - Complex64::new(0.0, 0.5)).norm() < 1e-12);
    }
}
