use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::run::{AlignmentRecord, RunOutput};
use super::stats::ConvergenceRecord;
use crate::error::FormatError;
use crate::io::fmt_num;

/// `key: value` lines describing a run. Field names are stable.
pub fn write_stats_report<W: Write>(mut w: W, out: &RunOutput) -> Result<(), FormatError> {
    let s = &out.stats;
    let t = &out.timing;
    let mut kv = |k: &str, v: String| writeln!(w, "{k}: {v}");
    kv("mode", out.mode.to_string())?;
    kv("seed", out.seed.to_string())?;
    kv("scans", out.scans.to_string())?;
    kv("alignments", out.alignments.len().to_string())?;
    kv("markers", s.markers.to_string())?;
    for (k, axis) in ["x", "y", "z"].iter().enumerate() {
        kv(&format!("error_{axis}_mean"), fmt_num(s.mean[k]))?;
        kv(&format!("error_{axis}_var"), fmt_num(s.variance[k]))?;
    }
    kv("error_d_mean", fmt_num(s.d_mean))?;
    kv("error_d_var", fmt_num(s.d_variance))?;
    kv("localization_calls", t.localization_calls.to_string())?;
    kv("localization_seconds", fmt_num(t.localization_seconds))?;
    kv("localization_seconds_per_call", fmt_num(t.localization_per_call()))?;
    kv("localization_seconds_per_tick", fmt_num(t.localization_per_tick()))?;
    kv("matching_calls", t.matching_calls.to_string())?;
    kv("matching_seconds", fmt_num(t.matching_seconds))?;
    kv("matching_seconds_per_call", fmt_num(t.matching_per_call()))?;
    kv("total_seconds", fmt_num(t.total_seconds()))?;
    if let Some(m) = &out.global_map {
        kv("map_points", m.len().to_string())?;
    }
    Ok(())
}

/// Reads `key: value` lines; blank lines and `#` comments are skipped.
pub fn parse_stats_report<R: BufRead>(r: R) -> Result<BTreeMap<String, String>, FormatError> {
    let mut out = BTreeMap::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once(':').ok_or_else(|| FormatError::Parse {
            line: i + 1,
            msg: "expected `key: value`".into(),
        })?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// `scan,tick,x,y,z,yaw,pitch,roll,mse,iterations,converged,elapsed`.
pub fn write_alignment_log<W: Write>(mut w: W, records: &[AlignmentRecord]) -> Result<(), FormatError> {
    writeln!(w, "scan,tick,x,y,z,yaw,pitch,roll,mse,iterations,converged,elapsed")?;
    for r in records {
        let (yaw, pitch, roll) = r.transform.euler();
        let t = r.transform.translation;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scan,
            r.tick,
            fmt_num(t.x),
            fmt_num(t.y),
            fmt_num(t.z),
            fmt_num(yaw),
            fmt_num(pitch),
            fmt_num(roll),
            fmt_num(r.mse),
            r.iterations,
            u8::from(r.converged),
            fmt_num(r.elapsed)
        )?;
    }
    Ok(())
}

/// `offset_x,offset_y,offset_z,period,final_error`; `period` is empty when
/// the estimate never settled.
pub fn write_convergence_csv<W: Write>(mut w: W, records: &[ConvergenceRecord]) -> Result<(), FormatError> {
    writeln!(w, "offset_x,offset_y,offset_z,period,final_error")?;
    for r in records {
        let [x, y, z] = r.initial_error;
        let period = r.period.map(fmt_num).unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", fmt_num(x), fmt_num(y), fmt_num(z), period, fmt_num(r.final_error))?;
    }
    Ok(())
}
