use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::experiment::ExperimentRecord;

pub const SPEEDS_HEADER: [&str; 15] = [
    "profile",
    "law",
    "theta_deg",
    "K_B",
    "rho_B",
    "sigma_l",
    "sigma_r",
    "s_predicted",
    "s_measured",
    "rel_error",
    "dispersion_proxy",
    "classification",
    "entropy_loss",
    "status",
    "digest",
];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// Writes the `speeds.csv` table.
pub fn write_speeds(records: &[ExperimentRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SPEEDS_HEADER)?;
    for r in records {
        w.write_record([
            r.profile.clone(),
            r.law.clone(),
            r.theta_deg.to_string(),
            r.k_b.to_string(),
            r.rho_b.to_string(),
            r.sigma_l.to_string(),
            r.sigma_r.to_string(),
            r.s_predicted.to_string(),
            opt(r.s_measured),
            opt(r.rel_error),
            r.dispersion_proxy.to_string(),
            r.classification.map_or("", |c| c.name()).to_string(),
            opt(r.entropy_loss),
            r.status.name().to_string(),
            r.digest.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row of a speeds table as read back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedRow {
    pub profile: String,
    pub law: String,
    pub theta_deg: f64,
    #[serde(rename = "K_B")]
    pub k_b: f64,
    #[serde(rename = "rho_B")]
    pub rho_b: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
    pub s_predicted: f64,
    pub s_measured: Option<f64>,
    pub rel_error: Option<f64>,
    pub dispersion_proxy: f64,
    #[serde(default)]
    pub classification: Option<String>,
    #[serde(default)]
    pub entropy_loss: Option<f64>,
    #[serde(default)]
    pub status: Option<String>,
    #[serde(default)]
    pub digest: Option<String>,
}

pub fn read_speeds(input: impl Read) -> Result<Vec<SpeedRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<SpeedRow>, _>>()
        .map_err(|e| Error::MalformedRecords(e.to_string()))?;
    Ok(rows)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub count: usize,
    pub measured: usize,
    pub median_rel_error: Option<f64>,
    pub max_rel_error: Option<f64>,
}

impl ErrorStats {
    fn from_errors(count: usize, mut errors: Vec<f64>) -> Self {
        let measured = errors.len();
        let max = errors
            .iter()
            .copied()
            .fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))));
        Self {
            count,
            measured,
            median_rel_error: (!errors.is_empty()).then(|| median(&mut errors)),
            max_rel_error: max,
        }
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub overall: ErrorStats,
    /// Keyed by the angle in degrees.
    pub per_angle: BTreeMap<String, ErrorStats>,
    /// Least-squares slope of measured against predicted speed through the origin.
    pub slope: Option<f64>,
    /// Pearson correlation of measured and predicted speeds.
    pub correlation: Option<f64>,
}

/// Scatter statistics of predicted against measured speeds.
pub fn summarize(rows: &[SpeedRow]) -> Summary {
    let errs = |pred: &dyn Fn(&SpeedRow) -> bool| -> ErrorStats {
        let sel: Vec<&SpeedRow> = rows.iter().filter(|r| pred(r)).collect();
        ErrorStats::from_errors(sel.len(), sel.iter().filter_map(|r| r.rel_error).collect())
    };
    let mut angles: Vec<f64> = rows.iter().map(|r| r.theta_deg).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup();
    let per_angle = angles
        .iter()
        .map(|&a| (a.to_string(), errs(&|r: &SpeedRow| r.theta_deg == a)))
        .collect();

    let pairs: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.s_measured.map(|m| (r.s_predicted, m)))
        .collect();
    let (slope, correlation) = if pairs.len() >= 2 {
        let n = pairs.len() as f64;
        let sxy: f64 = pairs.iter().map(|(p, m)| p * m).sum();
        let sxx: f64 = pairs.iter().map(|(p, _)| p * p).sum();
        let (mp, mm) = (
            pairs.iter().map(|p| p.0).sum::<f64>() / n,
            pairs.iter().map(|p| p.1).sum::<f64>() / n,
        );
        let (mut cov, mut vp, mut vm) = (0.0, 0.0, 0.0);
        for (p, m) in &pairs {
            cov += (p - mp) * (m - mm);
            vp += (p - mp) * (p - mp);
            vm += (m - mm) * (m - mm);
        }
        let corr = if vp > 0.0 && vm > 0.0 {
            Some(cov / (vp * vm).sqrt())
        } else {
            None
        };
        (Some(sxy / sxx), corr)
    } else {
        (None, None)
    };
    Summary {
        overall: errs(&|_| true),
        per_angle,
        slope,
        correlation,
    }
}

fn row_of(r: &ExperimentRecord) -> SpeedRow {
    SpeedRow {
        profile: r.profile.clone(),
        law: r.law.clone(),
        theta_deg: r.theta_deg,
        k_b: r.k_b,
        rho_b: r.rho_b,
        sigma_l: r.sigma_l,
        sigma_r: r.sigma_r,
        s_predicted: r.s_predicted,
        s_measured: r.s_measured,
        rel_error: r.rel_error,
        dispersion_proxy: r.dispersion_proxy,
        classification: r.classification.map(|c| c.name().to_string()),
        entropy_loss: r.entropy_loss,
        status: Some(r.status.name().to_string()),
        digest: Some(r.digest.clone()),
    }
}

pub fn summarize_records(records: &[ExperimentRecord]) -> Summary {
    summarize(&records.iter().map(row_of).collect::<Vec<_>>())
}

/// Writes `speeds.csv`, `entropy_<id>.csv` for every record with an entropy
/// trace, and `summary.json` into `dir`. Returns the paths written.
pub fn emit_outputs(records: &[ExperimentRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let speeds = dir.join("speeds.csv");
    write_speeds(records, BufWriter::new(File::create(&speeds)?))?;
    written.push(speeds);

    for r in records {
        if let Some(trace) = &r.entropy {
            let p = dir.join(format!("entropy_{:04}.csv", r.id));
            trace.write_csv(BufWriter::new(File::create(&p)?))?;
            written.push(p);
        }
    }

    let summary = dir.join("summary.json");
    let mut f = BufWriter::new(File::create(&summary)?);
    serde_json::to_writer_pretty(&mut f, &summarize_records(records))?;
    writeln!(f)?;
    f.flush()?;
    written.push(summary);
    Ok(written)
}
