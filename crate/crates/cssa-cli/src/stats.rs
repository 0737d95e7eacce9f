//! Per-entry statistics: space split and mean random-access latency.

use std::time::Instant;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cssa::SeedCollection;

/// One row of the stats table.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub seed: String,
    pub reference: String,
    pub rho: usize,
    pub payload_bpc: f64,
    pub overhead_bpc: f64,
    pub time_us: f64,
    pub depth: usize,
}

impl StatsRow {
    pub fn space_bpc(&self) -> f64 {
        self.payload_bpc + self.overhead_bpc
    }

    pub fn csv_header() -> &'static str {
        "seed,reference,rho,payload_bpc,overhead_bpc,time_us,depth"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{}",
            self.seed,
            self.reference,
            self.rho,
            self.payload_bpc,
            self.overhead_bpc,
            self.time_us,
            self.depth
        )
    }

    #[cfg(test)]
    pub fn from_csv(line: &str) -> Result<Self> {
        use anyhow::{bail, Context};
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            bail!("expected 7 CSV fields, got {}", fields.len());
        }
        Ok(Self {
            seed: fields[0].to_string(),
            reference: fields[1].to_string(),
            rho: fields[2].parse().context("rho")?,
            payload_bpc: fields[3].parse().context("payload_bpc")?,
            overhead_bpc: fields[4].parse().context("overhead_bpc")?,
            time_us: fields[5].parse().context("time_us")?,
            depth: fields[6].parse().context("depth")?,
        })
    }
}

/// Mean microseconds per random access to `name`, over `accesses` indices
/// pre-generated from the seeded generator, measured warm.
pub fn measure_access(
    coll: &SeedCollection,
    name: &str,
    accesses: usize,
    rng_seed: u64,
) -> Result<f64> {
    let n = coll.text_len();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let indices: Vec<usize> = (0..accesses).map(|_| rng.random_range(0..n)).collect();
    let mut sink = 0usize;
    for &i in &indices {
        sink = sink.wrapping_add(coll.access(name, i)?);
    }
    let start = Instant::now();
    for &i in &indices {
        sink = sink.wrapping_add(coll.access(name, i)?);
    }
    let elapsed = start.elapsed();
    std::hint::black_box(sink);
    Ok(elapsed.as_secs_f64() * 1e6 / accesses as f64)
}

/// Collects one row per entry, in stored order.
pub fn collect(coll: &SeedCollection, accesses: usize, rng_seed: u64) -> Result<Vec<StatsRow>> {
    let n = coll.text_len() as f64;
    let mut rows = Vec::new();
    for (name, entry) in coll.entries() {
        let report = entry.size_report();
        rows.push(StatsRow {
            seed: entry.seed_spec().to_string(),
            reference: entry.base().to_string(),
            rho: entry.rho(),
            payload_bpc: (report.payload_bits + report.explicit_bits) as f64 / n,
            overhead_bpc: report.overhead_bits as f64 / n,
            time_us: measure_access(coll, name, accesses, rng_seed)?,
            depth: coll.depth(name)?,
        });
    }
    Ok(rows)
}

pub fn render_csv(rows: &[StatsRow]) -> String {
    let mut out = String::from(StatsRow::csv_header());
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

/// Full table with the itemized space split.
pub fn render_table(coll: &SeedCollection, rows: &[StatsRow]) -> String {
    let n = coll.text_len();
    let sa_bits = cssa::succinct::bits_for(n) * n;
    let mut out = format!(
        "text: n={} sigma={}  SA (packed, shared): {:.2} bpc\n",
        n,
        coll.sigma(),
        sa_bits as f64 / n as f64
    );
    out.push_str(&format!(
        "{:<24} {:<24} {:>5} {:>12} {:>13} {:>10} {:>6}\n",
        "seed", "reference", "rho", "payload bpc", "overhead bpc", "time (us)", "depth"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<24} {:<24} {:>5} {:>12.3} {:>13.3} {:>10.3} {:>6}\n",
            r.seed, r.reference, r.rho, r.payload_bpc, r.overhead_bpc, r.time_us, r.depth
        ));
    }
    out
}

/// The two-column-per-metric layout used for eyeballing: seed, reference,
/// space (bpc), time (us).
pub fn render_paper(rows: &[StatsRow]) -> String {
    let mut out = format!(
        "{:<24} {:<24} {:>11} {:>9}\n",
        "seed", "reference", "space (bpc)", "time (us)"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<24} {:<24} {:>11.2} {:>9.0}\n",
            r.seed, r.reference, r.space_bpc(), r.time_us
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip() {
        let row = StatsRow {
            seed: "1101".into(),
            reference: "SA".into(),
            rho: 3,
            payload_bpc: 4.25,
            overhead_bpc: 0.132812,
            time_us: 0.73,
            depth: 1,
        };
        let parsed = StatsRow::from_csv(&row.to_csv()).unwrap();
        assert_eq!(parsed.seed, row.seed);
        assert_eq!(parsed.reference, row.reference);
        assert_eq!(parsed.rho, row.rho);
        assert!((parsed.payload_bpc - row.payload_bpc).abs() < 1e-9);
        assert!((parsed.overhead_bpc - row.overhead_bpc).abs() < 1e-9);
        assert!((parsed.time_us - row.time_us).abs() < 1e-9);
        assert_eq!(parsed.depth, row.depth);
        // Re-serialization is stable.
        assert_eq!(parsed.to_csv(), row.to_csv());
    }

    #[test]
    fn csv_rejects_short_lines() {
        assert!(StatsRow::from_csv("a,b,c").is_err());
    }
}
