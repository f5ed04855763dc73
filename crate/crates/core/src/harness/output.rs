use std::io::Write;

use serde::Serialize;

use crate::error::Result;

use super::phase::PhasePoint;

pub const PHASE_CSV_HEADER: &str =
    "n,gamma,rho,trials,exact_recovery_freq,local_recovery_freq,converse_witness_freq,mean_overlap,seed";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// CSV with [`PHASE_CSV_HEADER`]; frequencies not computed for a cell are `NA`.
pub fn phase_csv(points: &[PhasePoint]) -> String {
    let mut s = String::from(PHASE_CSV_HEADER);
    s.push('\n');
    for p in points {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.n,
            p.gamma,
            p.rho,
            p.trials,
            opt(p.exact_recovery_freq),
            opt(p.local_recovery_freq),
            p.converse_witness_freq,
            opt(p.mean_overlap),
            p.seed
        ));
    }
    s
}

pub fn write_json_lines<T: Serialize, W: Write>(items: &[T], mut w: W) -> Result<()> {
    for it in items {
        serde_json::to_writer(&mut w, it)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
