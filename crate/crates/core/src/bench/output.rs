use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::scaling::ScalingRecord;
use crate::error::Result;

/// Hex SHA-256 of the configuration's JSON encoding.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_vec(config)?;
    Ok(hex::encode(Sha256::digest(&json)))
}

/// `# config_hash=<hash>` followed by one CSV row per record.
pub fn write_scaling_csv<W: Write>(mut out: W, hash: &str, records: &[ScalingRecord]) -> Result<()> {
    writeln!(out, "# config_hash={hash}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON object `{"config_hash": ..., "summary": ...}`.
pub fn write_summary_json<W: Write, T: Serialize>(mut out: W, hash: &str, summary: &T) -> Result<()> {
    let doc = serde_json::json!({ "config_hash": hash, "summary": summary });
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config_hash(&(1, "x")).unwrap();
        assert_eq!(a, config_hash(&(1, "x")).unwrap());
        assert_ne!(a, config_hash(&(2, "x")).unwrap());
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn csv_header_line() {
        let rec = ScalingRecord {
            chain_id: 0,
            n: 2,
            eps: 0.5,
            delta: 1.0,
            classical_diffusions: 1.0,
            quantum_diffusion_calls: 1.0,
            classical_checks: 1.0,
            quantum_check_reflections: 0.0,
            trials: 1,
            s: 2,
            k: 4,
        };
        let mut buf = Vec::new();
        write_scaling_csv(&mut buf, "abc", &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# config_hash=abc");
        assert!(lines[1].starts_with("chain_id,n,eps,delta,classical_diffusions"));
        assert_eq!(lines.len(), 3);
    }
}
