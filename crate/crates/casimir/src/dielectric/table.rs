//! Tabulated optical data: photon energy (eV) against Im ε(ω).

use std::io::BufRead;

use super::DielectricError;

/// Sorted table of (ħω in eV, Im ε) samples, interpolated log-log linearly
/// between samples (optical data spans decades).
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTable {
    omegas: Vec<f64>,
    im_eps: Vec<f64>,
}

impl OpticalTable {
    pub fn new(mut rows: Vec<(f64, f64)>) -> Result<Self, DielectricError> {
        if rows.len() < 2 {
            return Err(DielectricError::TableInvalid(format!(
                "need at least 2 rows, got {}",
                rows.len()
            )));
        }
        for (i, &(w, im)) in rows.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(DielectricError::TableInvalid(format!(
                    "row {}: photon energy {w} must be positive and finite",
                    i + 1
                )));
            }
            if !(im >= 0.0) || !im.is_finite() {
                return Err(DielectricError::TableInvalid(format!(
                    "row {}: Im eps {im} must be non-negative",
                    i + 1
                )));
            }
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(DielectricError::TableInvalid("duplicate photon energies".into()));
        }
        Ok(Self {
            omegas: rows.iter().map(|r| r.0).collect(),
            im_eps: rows.iter().map(|r| r.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn omega_min(&self) -> f64 {
        self.omegas[0]
    }

    pub fn omega_max(&self) -> f64 {
        *self.omegas.last().unwrap()
    }

    pub(crate) fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Im ε at ω inside the tabulated range, log-log linear between samples.
    /// Zero samples are handled by falling back to linear interpolation in ω.
    pub fn im_eps_at(&self, omega: f64) -> f64 {
        debug_assert!(omega >= self.omega_min() && omega <= self.omega_max());
        let i = match self.omegas.binary_search_by(|v| v.total_cmp(&omega)) {
            Ok(i) => return self.im_eps[i],
            Err(i) => i - 1,
        };
        let (w0, w1) = (self.omegas[i], self.omegas[i + 1]);
        let (y0, y1) = (self.im_eps[i], self.im_eps[i + 1]);
        if y0 > 0.0 && y1 > 0.0 {
            let t = (omega / w0).ln() / (w1 / w0).ln();
            (y0.ln() * (1.0 - t) + y1.ln() * t).exp()
        } else {
            let t = (omega - w0) / (w1 - w0);
            y0 * (1.0 - t) + y1 * t
        }
    }
}

/// Parse whitespace-separated two-column records "photon-energy  Im eps";
/// lines starting with '#' (and blank lines) are skipped.
pub fn load_optical_table<R: BufRead>(reader: R) -> Result<OpticalTable, DielectricError> {
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| DielectricError::TableParse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let parse = |tok: Option<&str>, what: &str| -> Result<f64, DielectricError> {
            tok.ok_or_else(|| DielectricError::TableParse {
                line: idx + 1,
                message: format!("missing {what} column"),
            })?
            .parse::<f64>()
            .map_err(|e| DielectricError::TableParse {
                line: idx + 1,
                message: format!("bad {what}: {e}"),
            })
        };
        let omega = parse(it.next(), "photon energy")?;
        let im = parse(it.next(), "Im eps")?;
        if it.next().is_some() {
            return Err(DielectricError::TableParse {
                line: idx + 1,
                message: "expected exactly two columns".into(),
            });
        }
        if im < 0.0 {
            return Err(DielectricError::TableParse {
                line: idx + 1,
                message: format!("Im eps {im} is negative"),
            });
        }
        rows.push((omega, im));
    }
    OpticalTable::new(rows)
}
