//! Sweep CSV files: `delta_si_khz, stress_mpa, p_plus1, p_minus1`, with
//! optional `#` comment lines before the header.

use std::io::{Read, Write};

use crate::analysis::FitData;
use crate::dynamics::SweepResult;
use crate::units::{khz, to_khz};

pub const SWEEP_COLUMNS: [&str; 4] = ["delta_si_khz", "stress_mpa", "p_plus1", "p_minus1"];

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing column {0}")]
    MissingColumn(&'static str),
    #[error("row {row}: bad number {text:?} in column {column}")]
    BadNumber {
        row: usize,
        column: &'static str,
        text: String,
    },
}

/// Write `comments` as `# ` lines, then the sweep table.
pub fn write_sweep_csv<W: Write>(
    mut out: W,
    sweep: &SweepResult,
    comments: &[String],
) -> Result<(), CsvError> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for i in 0..sweep.len() {
        w.write_record([
            to_khz(sweep.delta_si[i]).to_string(),
            (sweep.stress[i] / 1e6).to_string(),
            sweep.p_plus1[i].to_string(),
            sweep.p_minus1[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read the populations of a sweep CSV. `stress_mpa` may be absent.
pub fn read_sweep_csv<R: Read>(input: R) -> Result<FitData, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &'static str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or(CsvError::MissingColumn(name))
    };
    let cols = [
        ("delta_si_khz", col("delta_si_khz")?),
        ("p_plus1", col("p_plus1")?),
        ("p_minus1", col("p_minus1")?),
    ];
    let mut data = FitData {
        delta_si: Vec::new(),
        p_plus1: Vec::new(),
        p_minus1: Vec::new(),
    };
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let mut vals = [0.0; 3];
        for (slot, &(name, idx)) in vals.iter_mut().zip(&cols) {
            let text = rec.get(idx).unwrap_or("");
            *slot = text.parse().map_err(|_| CsvError::BadNumber {
                row: row + 1,
                column: name,
                text: text.to_owned(),
            })?;
        }
        data.delta_si.push(khz(vals[0]));
        data.p_plus1.push(vals[1]);
        data.p_minus1.push(vals[2]);
    }
    Ok(data)
}
