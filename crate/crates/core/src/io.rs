//! File formats: JSON density matrices, CSV counts and settings, and the
//! tab-separated log-likelihood trace.
//!
//! A density-matrix file stores every spin block once:
//!
//! ```json
//! {"n_photons": 1,
//!  "blocks": [{"two_j": 1, "multiplicity": 1,
//!              "rows": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}]}
//! ```

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::measurement::{CountRecord, Outcome, WaveplateSetting};
use crate::schur::su2_multiplicity;
use crate::states::{AccessibleDensityMatrix, BlockOperator};
use crate::{CMatrix, Error, Real, Result, C};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub two_j: usize,
    pub multiplicity: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n_photons: usize,
    pub blocks: Vec<BlockRecord>,
}

impl MatrixFile {
    pub fn from_matrix<T: Real>(rho: &AccessibleDensityMatrix<T>) -> Self {
        Self::from_operator(rho.operator())
    }

    pub fn from_operator<T: Real>(op: &BlockOperator<T>) -> Self {
        let blocks = op
            .blocks()
            .iter()
            .map(|b| BlockRecord {
                two_j: b.two_j,
                multiplicity: b.multiplicity,
                rows: b
                    .matrix
                    .row_iter()
                    .map(|r| r.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect())
                    .collect(),
            })
            .collect();
        Self {
            n_photons: op.n(),
            blocks,
        }
    }

    /// Checks the layout and builds the operator. Blocks may come in any
    /// order; absent spins are zero.
    pub fn to_operator<T: Real>(&self) -> Result<BlockOperator<T>> {
        let n = self.n_photons;
        let mut op = BlockOperator::<T>::zeros(n).map_err(|e| Error::Format(e.to_string()))?;
        let mut seen = BTreeMap::new();
        for (i, b) in self.blocks.iter().enumerate() {
            if seen.insert(b.two_j, i).is_some() {
                return Err(Error::Format(format!("block 2j = {} appears twice", b.two_j)));
            }
            let expected = su2_multiplicity(n, b.two_j)?;
            if expected == 0 || b.two_j > n {
                return Err(Error::Format(format!("2j = {} does not occur for N = {n}", b.two_j)));
            }
            if b.multiplicity as u128 != expected {
                return Err(Error::Format(format!(
                    "block 2j = {} has multiplicity {expected}, file says {}",
                    b.two_j, b.multiplicity
                )));
            }
            let d = b.two_j + 1;
            if b.rows.len() != d || b.rows.iter().any(|r| r.len() != d) {
                return Err(Error::Format(format!("block 2j = {} must be {d}×{d}", b.two_j)));
            }
            if b.rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Format(format!("block 2j = {} has a non-finite entry", b.two_j)));
            }
            let m = CMatrix::from_fn(d, d, |r, c| {
                let [re, im] = b.rows[r][c];
                C::new(T::lit(re), T::lit(im))
            });
            *op.block_mut(b.two_j).expect("occurring spin") = m;
        }
        Ok(op)
    }

    pub fn to_matrix<T: Real>(&self) -> Result<AccessibleDensityMatrix<T>> {
        AccessibleDensityMatrix::new(self.to_operator()?)
    }
}

pub fn write_matrix<T: Real, W: Write>(w: W, rho: &AccessibleDensityMatrix<T>) -> Result<()> {
    serde_json::to_writer_pretty(w, &MatrixFile::from_matrix(rho)).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_matrix<T: Real, R: Read>(r: R) -> Result<AccessibleDensityMatrix<T>> {
    let file: MatrixFile = serde_json::from_reader(r).map_err(|e| Error::Format(e.to_string()))?;
    file.to_matrix()
}

const COUNTS_HEADER: [&str; 5] = ["qwp_deg", "hwp_deg", "n_h", "n_v", "count"];
const SETTINGS_HEADER: [&str; 2] = ["qwp_deg", "hwp_deg"];

fn csv_error(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Format(format!("line {}: {e}", p.line())),
        None => Error::Format(e.to_string()),
    }
}

fn check_header<R: Read>(rd: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = rd.headers().map_err(csv_error)?;
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::Format(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r)
}

#[derive(Deserialize)]
struct CountRow {
    qwp_deg: f64,
    hwp_deg: f64,
    n_h: usize,
    n_v: usize,
    count: f64,
}

#[derive(Deserialize)]
struct SettingRow {
    qwp_deg: f64,
    hwp_deg: f64,
}

/// Reads `qwp_deg,hwp_deg,n_h,n_v,count` rows.
pub fn read_counts<R: Read>(r: R) -> Result<Vec<CountRecord>> {
    let mut rd = reader(r);
    check_header(&mut rd, &COUNTS_HEADER)?;
    let mut out = Vec::new();
    for row in rd.deserialize::<CountRow>() {
        let row = row.map_err(csv_error)?;
        let setting = WaveplateSetting::new(row.qwp_deg, row.hwp_deg).map_err(|e| Error::Format(e.to_string()))?;
        if !(row.count.is_finite() && row.count >= 0.0) {
            return Err(Error::Format(format!(
                "row {}: count {} must be ≥ 0",
                out.len() + 1,
                row.count
            )));
        }
        out.push(CountRecord {
            setting,
            outcome: Outcome {
                n_h: row.n_h,
                n_v: row.n_v,
            },
            count: row.count,
        });
    }
    if out.is_empty() {
        return Err(Error::Format("no count rows".into()));
    }
    Ok(out)
}

fn fmt_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

pub fn write_counts<W: Write>(w: W, records: &[CountRecord]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(COUNTS_HEADER).map_err(csv_error)?;
    for r in records {
        wr.write_record([
            format!("{}", r.setting.qwp_deg),
            format!("{}", r.setting.hwp_deg),
            r.outcome.n_h.to_string(),
            r.outcome.n_v.to_string(),
            fmt_number(r.count),
        ])
        .map_err(csv_error)?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads `qwp_deg,hwp_deg` rows.
pub fn read_settings<R: Read>(r: R) -> Result<Vec<WaveplateSetting>> {
    let mut rd = reader(r);
    check_header(&mut rd, &SETTINGS_HEADER)?;
    let mut out = Vec::new();
    for row in rd.deserialize::<SettingRow>() {
        let row = row.map_err(csv_error)?;
        out.push(WaveplateSetting::new(row.qwp_deg, row.hwp_deg).map_err(|e| Error::Format(e.to_string()))?);
    }
    if out.is_empty() {
        return Err(Error::Format("no settings".into()));
    }
    Ok(out)
}

pub fn write_settings<W: Write>(w: W, settings: &[WaveplateSetting]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(SETTINGS_HEADER).map_err(csv_error)?;
    for s in settings {
        wr.write_record([format!("{}", s.qwp_deg), format!("{}", s.hwp_deg)])
            .map_err(csv_error)?;
    }
    wr.flush()?;
    Ok(())
}

/// Two columns: iteration and log-likelihood.
pub fn write_trace<T: Real, W: Write>(mut w: W, trace: &[T]) -> Result<()> {
    writeln!(w, "iteration\tlog_likelihood")?;
    for (i, v) in trace.iter().enumerate() {
        writeln!(w, "{i}\t{:.12e}", v.as_f64())?;
    }
    Ok(())
}
