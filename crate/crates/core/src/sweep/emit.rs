//! CSV output for records, metrics and heatmaps.

use std::io::Write;
use std::path::{Path, PathBuf};

use super::metrics::{heatmaps, relative_reduction_series, Heatmap, MetricPoint};
use super::{SweepConfig, SweepError, SweepRecord};

pub const RECORD_HEADER: [&str; 17] = [
    "design",
    "profile",
    "n",
    "m",
    "k",
    "t_ebit_ns",
    "t_C_ns",
    "t_H_ns",
    "sum_CU_ns",
    "delta_P_ns",
    "delta_P_M_ns",
    "delta_D_ns",
    "delta_D_M_ns",
    "idle_work_ns",
    "qubits_total",
    "ebits_used",
    "depth",
];

/// Writes records as CSV after re-checking every record.
pub fn write_records<W: Write>(records: &[SweepRecord], out: W) -> Result<(), SweepError> {
    if records.is_empty() {
        return Err(SweepError::Metric("no records to write".into()));
    }
    for r in records {
        r.check().map_err(SweepError::Check)?;
    }
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<(), SweepError> {
    let mut buf = Vec::new();
    write_records(records, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn write_heatmap<W: Write>(map: &Heatmap, out: W) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n\\t_ebit_ns".to_string()];
    header.extend(map.t_ebit_values.iter().map(|t| t.to_string()));
    w.write_record(&header)?;
    for (n, row) in map.n_values.iter().zip(&map.cells) {
        let mut line = vec![n.to_string()];
        line.extend(row.iter().map(|k| k.to_string()));
        w.write_record(&line)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_heatmap(map: &Heatmap, path: impl AsRef<Path>) -> Result<(), SweepError> {
    let mut buf = Vec::new();
    write_heatmap(map, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn write_metrics<W: Write>(points: &[MetricPoint], out: W) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "design",
        "profile",
        "n",
        "m",
        "k",
        "t_ebit_ns",
        "relative_reduction",
        "mitigation_fraction",
    ])?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for p in points {
        w.write_record([
            p.design.clone(),
            p.profile.clone(),
            p.n.to_string(),
            p.m.to_string(),
            opt(p.k.map(|k| k.to_string())),
            opt(p.t_ebit_ns.map(|t| t.to_string())),
            format!("{:.6}", p.reduction),
            opt(p.mitigation.map(|x| format!("{x:.6}"))),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<prefix>.csv`, `<prefix>_metrics.csv` and one
/// `<prefix>_heatmap_<design>_<profile>.csv` per distributed group.
/// Returns the paths written.
pub fn emit_all(config: &SweepConfig, records: &[SweepRecord]) -> Result<Vec<PathBuf>, SweepError> {
    let prefix = config.output.to_string_lossy().into_owned();
    if let Some(dir) = config.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut written = Vec::new();
    let main = PathBuf::from(format!("{prefix}.csv"));
    emit_csv(records, &main)?;
    written.push(main);

    let has_baselines = records
        .iter()
        .all(|r| r.k.is_some() || config.designs.contains(&config.baselines.design))
        && config
            .distributed
            .as_ref()
            .is_none_or(|d| d.k_values.contains(&config.baselines.k));
    if has_baselines {
        let points =
            relative_reduction_series(records, config.baselines.design.name(), config.baselines.k)?;
        let path = PathBuf::from(format!("{prefix}_metrics.csv"));
        let mut buf = Vec::new();
        write_metrics(&points, &mut buf)?;
        std::fs::write(&path, buf)?;
        written.push(path);
    }

    for map in heatmaps(records)? {
        let profile: String = map
            .profile
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '_' {
                    c
                } else {
                    '-'
                }
            })
            .collect();
        let path = PathBuf::from(format!("{prefix}_heatmap_{}_{profile}.csv", map.design));
        emit_heatmap(&map, &path)?;
        written.push(path);
    }
    Ok(written)
}
