//! Survival-probability estimates over a grid of sequence lengths.
//!
//! On disk a dataset is a CSV file with one row per `(m, b1, b2)` cell:
//!
//! ```text
//! m,b1,b2,mean,stderr,k,shots
//! ```
//!
//! Rows are sorted by `(m, b1, b2)`. Per-sequence samples are kept in memory
//! for bootstrapping but are not written out.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::fit::DecayPoint;
use crate::protocol::{mean_and_stderr, Mode, Setting};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettingEstimate {
    pub setting: Setting,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthRow {
    pub m: usize,
    /// One estimate per setting, sorted by `(b1, b2)`.
    pub estimates: Vec<SettingEstimate>,
    /// `samples[sequence][setting]`, in the order of `estimates`.
    pub samples: Option<Vec<Vec<f64>>>,
}

impl LengthRow {
    pub fn estimate(&self, setting: Setting) -> Option<&SettingEstimate> {
        self.estimates.iter().find(|e| e.setting == setting)
    }

    fn position(&self, setting: Setting) -> Option<usize> {
        self.estimates.iter().position(|e| e.setting == setting)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetMeta {
    pub order: Option<u32>,
    pub mode: Option<Mode>,
    pub sequences_per_length: usize,
    pub shots: u64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayDataset {
    pub meta: DatasetMeta,
    pub rows: Vec<LengthRow>,
}

/// Linear combinations of the four survival curves that isolate one decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combination {
    /// With `b2` toggling: `Pr00 + Pr01 - Pr10 - Pr11 = 4 A p0^m`.
    /// Without: `Pr00 - Pr10 = 2 A p0^m + 2 B1 p1^m`.
    Parity,
    /// With `b2` toggling: `Pr00 - Pr01 = 2 B p1^m`.
    /// Without: `Pr00 + Pr10 = 2 B2 p1^m + 2 C`.
    Faithful,
}

impl Combination {
    pub fn weights(&self, toggle_z: bool) -> Vec<(Setting, f64)> {
        let s = Setting::new;
        match (self, toggle_z) {
            (Combination::Parity, true) => vec![
                (s(false, false), 1.0),
                (s(false, true), 1.0),
                (s(true, false), -1.0),
                (s(true, true), -1.0),
            ],
            (Combination::Faithful, true) => vec![(s(false, false), 1.0), (s(false, true), -1.0)],
            (Combination::Parity, false) => vec![(s(false, false), 1.0), (s(true, false), -1.0)],
            (Combination::Faithful, false) => vec![(s(false, false), 1.0), (s(true, false), 1.0)],
        }
    }
}

impl DecayDataset {
    /// Whether the `b2 = 1` settings were measured.
    pub fn toggles_z(&self) -> bool {
        self.rows
            .first()
            .map(|r| r.estimates.iter().any(|e| e.setting.b2))
            .unwrap_or(false)
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.m).collect()
    }

    pub fn has_samples(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.samples.is_some())
    }

    /// Points `(m, S(m), stderr)` of a combination.
    ///
    /// With per-sequence samples, the standard error comes from the spread of
    /// the per-sequence combination, which accounts for the draws shared by
    /// the settings; otherwise the per-setting errors add in quadrature.
    pub fn combination(&self, which: Combination) -> Result<Vec<DecayPoint>> {
        let weights = self.combination_weights(which)?;
        self.rows
            .iter()
            .map(|row| match &row.samples {
                Some(samples) => {
                    let idx = weight_positions(row, &weights)?;
                    let (y, stderr) = mean_and_stderr(
                        samples
                            .iter()
                            .map(|seq| idx.iter().map(|(i, w)| w * seq[*i]).sum()),
                    );
                    Ok(DecayPoint::new(row.m as f64, y, stderr))
                }
                None => {
                    let mut y = 0.0;
                    let mut var = 0.0;
                    for (setting, w) in &weights {
                        let e = row
                            .estimate(*setting)
                            .ok_or_else(|| Error::Data(format!("m = {}: missing cell", row.m)))?;
                        y += w * e.mean;
                        var += (w * e.stderr).powi(2);
                    }
                    Ok(DecayPoint::new(row.m as f64, y, var.sqrt()))
                }
            })
            .collect()
    }

    /// Combination points with every length's sequences resampled by `indices[row]`.
    pub(crate) fn resampled_combination(
        &self,
        which: Combination,
        indices: &[Vec<usize>],
    ) -> Result<Vec<DecayPoint>> {
        let weights = self.combination_weights(which)?;
        self.rows
            .iter()
            .zip(indices)
            .map(|(row, picks)| {
                let samples = row
                    .samples
                    .as_ref()
                    .ok_or_else(|| Error::Data("dataset has no per-sequence samples".into()))?;
                let idx = weight_positions(row, &weights)?;
                let (y, stderr) = mean_and_stderr(
                    picks
                        .iter()
                        .map(|&s| idx.iter().map(|(i, w)| w * samples[s][*i]).sum()),
                );
                Ok(DecayPoint::new(row.m as f64, y, stderr))
            })
            .collect()
    }

    fn combination_weights(&self, which: Combination) -> Result<Vec<(Setting, f64)>> {
        if self.rows.is_empty() {
            return Err(Error::Data("dataset is empty".into()));
        }
        Ok(which.weights(self.toggles_z()))
    }

    /// Writes the long-format CSV.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for row in &self.rows {
            for e in &row.estimates {
                w.serialize(CsvRow {
                    m: row.m,
                    b1: e.setting.b1 as u8,
                    b2: e.setting.b2 as u8,
                    mean: e.mean,
                    stderr: e.stderr,
                    k: self.meta.sequences_per_length,
                    shots: self.meta.shots,
                })
                .map_err(csv_error)?;
            }
        }
        w.flush().map_err(|e| Error::Data(e.to_string()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Data(e.to_string()))
    }

    /// Parses and validates a CSV written by [`DecayDataset::write_csv`].
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(csv_error)?.clone();
        if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
            return Err(Error::Data(format!(
                "expected header {}, found {}",
                CSV_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows: Vec<LengthRow> = Vec::new();
        let mut meta: Option<(usize, u64)> = None;
        let mut last: Option<(usize, Setting)> = None;
        for record in rdr.deserialize::<CsvRow>() {
            let r = record.map_err(csv_error)?;
            if r.b1 > 1 || r.b2 > 1 {
                return Err(Error::Data(format!("m = {}: b1, b2 must be bits", r.m)));
            }
            if r.m == 0 {
                return Err(Error::Data("sequence length 0".into()));
            }
            if !r.mean.is_finite() || !r.stderr.is_finite() || r.stderr < 0.0 {
                return Err(Error::Data(format!(
                    "m = {}: mean and stderr must be finite with stderr >= 0",
                    r.m
                )));
            }
            if r.k == 0 {
                return Err(Error::Data("k must be >= 1".into()));
            }
            match meta {
                None => meta = Some((r.k, r.shots)),
                Some(m) if m != (r.k, r.shots) => {
                    return Err(Error::Data("k and shots must be constant".into()))
                }
                _ => {}
            }
            let setting = Setting::new(r.b1 == 1, r.b2 == 1);
            if let Some(prev) = last {
                if (r.m, setting) <= prev {
                    return Err(Error::Data(format!(
                        "rows must be strictly sorted by (m, b1, b2); offending m = {}",
                        r.m
                    )));
                }
            }
            last = Some((r.m, setting));
            let estimate = SettingEstimate {
                setting,
                mean: r.mean,
                stderr: r.stderr,
            };
            match rows.last_mut() {
                Some(row) if row.m == r.m => row.estimates.push(estimate),
                _ => rows.push(LengthRow {
                    m: r.m,
                    estimates: vec![estimate],
                    samples: None,
                }),
            }
        }
        let Some((k, shots)) = meta else {
            return Err(Error::Data("no data rows".into()));
        };
        let toggle_z = rows[0].estimates.iter().any(|e| e.setting.b2);
        let expected = Setting::all(toggle_z);
        for row in &rows {
            let got: Vec<Setting> = row.estimates.iter().map(|e| e.setting).collect();
            if got != expected {
                return Err(Error::Data(format!(
                    "m = {}: expected settings {:?}, found {:?}",
                    row.m, expected, got
                )));
            }
        }
        Ok(DecayDataset {
            meta: DatasetMeta {
                order: None,
                mode: None,
                sequences_per_length: k,
                shots,
                seed: None,
            },
            rows,
        })
    }
}

fn weight_positions(row: &LengthRow, weights: &[(Setting, f64)]) -> Result<Vec<(usize, f64)>> {
    weights
        .iter()
        .map(|(s, w)| {
            row.position(*s)
                .map(|i| (i, *w))
                .ok_or_else(|| Error::Data(format!("m = {}: missing setting {:?}", row.m, s)))
        })
        .collect()
}

const CSV_HEADER: [&str; 7] = ["m", "b1", "b2", "mean", "stderr", "k", "shots"];

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    m: usize,
    b1: u8,
    b2: u8,
    mean: f64,
    stderr: f64,
    k: usize,
    shots: u64,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Data(e.to_string())
}
