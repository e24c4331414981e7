//! Curve tables on disk: `t,value[,lo,hi]` for survival-type curves and
//! `t,value[,sd,lo,hi]` for tau processes. Numbers are written in shortest
//! round-trip form, undefined band entries as `NaN`.

use std::fmt::Write as _;

use curesurv::inference::{normal_interval, sample_sd, VectorBootstrap};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub sd: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
    pub band: Option<Band>,
    /// Whether the `sd` column is written.
    pub with_sd: bool,
}

impl CurveTable {
    pub fn new(t: Vec<f64>, value: Vec<f64>) -> Self {
        CurveTable {
            t,
            value,
            band: None,
            with_sd: false,
        }
    }

    pub fn with_band(mut self, band: Option<Band>) -> Self {
        self.band = band;
        self
    }

    pub fn tau(mut self) -> Self {
        self.with_sd = true;
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value");
        if self.band.is_some() {
            out.push_str(if self.with_sd { ",sd,lo,hi" } else { ",lo,hi" });
        }
        out.push('\n');
        for k in 0..self.t.len() {
            let _ = write!(out, "{},{}", self.t[k], self.value[k]);
            if let Some(b) = &self.band {
                if self.with_sd {
                    let _ = write!(out, ",{}", b.sd[k]);
                }
                let _ = write!(out, ",{},{}", b.lo[k], b.hi[k]);
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`CurveTable::to_csv`]. Band SDs are NaN when the file has
    /// no `sd` column.
    pub fn parse_csv(text: &str) -> Result<CurveTable, CliError> {
        let bad = |m: String| CliError::Validation(format!("curve csv: {m}"));
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| bad(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let (has_band, with_sd) = match header
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>()
            .as_slice()
        {
            ["t", "value"] => (false, false),
            ["t", "value", "lo", "hi"] => (true, false),
            ["t", "value", "sd", "lo", "hi"] => (true, true),
            other => return Err(bad(format!("unexpected header {other:?}"))),
        };
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            for (c, field) in rec.iter().enumerate() {
                let v = field
                    .parse::<f64>()
                    .map_err(|_| bad(format!("line {}: bad number `{field}`", line + 2)))?;
                cols[c].push(v);
            }
        }
        let mut cols = cols.into_iter();
        let t = cols.next().unwrap_or_default();
        let value = cols.next().unwrap_or_default();
        let band = has_band.then(|| {
            let sd = if with_sd {
                cols.next().unwrap_or_default()
            } else {
                vec![f64::NAN; t.len()]
            };
            Band {
                sd,
                lo: cols.next().unwrap_or_default(),
                hi: cols.next().unwrap_or_default(),
            }
        });
        Ok(CurveTable {
            t,
            value,
            band,
            with_sd,
        })
    }
}

/// Pointwise normal bands for coordinates `range` of a vector bootstrap.
/// Replicate entries that are NaN count as undefined; a point with more
/// than half its replicates undefined gets a NaN band.
pub fn pointwise_band(boot: &VectorBootstrap, range: std::ops::Range<usize>, level: f64) -> Band {
    let mut band = Band {
        sd: Vec::with_capacity(range.len()),
        lo: Vec::with_capacity(range.len()),
        hi: Vec::with_capacity(range.len()),
    };
    let total = boot.replicates.len();
    for k in range {
        let vals: Vec<f64> = boot
            .replicates
            .iter()
            .flatten()
            .map(|r| r[k])
            .filter(|v| v.is_finite())
            .collect();
        let point = boot.point[k];
        let (sd, lo, hi) = if point.is_finite() && vals.len() >= 2 && 2 * vals.len() >= total {
            let sd = sample_sd(&vals);
            match normal_interval(point, sd, level) {
                Ok((lo, hi)) => (sd, lo, hi),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN),
            }
        } else {
            (f64::NAN, f64::NAN, f64::NAN)
        };
        band.sd.push(sd);
        band.lo.push(lo);
        band.hi.push(hi);
    }
    band
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_with_nan() {
        let c = CurveTable::new(vec![0.0, 0.1 + 0.2, 1.0 / 3.0], vec![1.0, 0.5, 0.25]).with_band(
            Some(Band {
                sd: vec![0.0, 0.01, f64::NAN],
                lo: vec![1.0, 0.48, f64::NAN],
                hi: vec![1.0, 0.52, f64::NAN],
            }),
        );
        let back = CurveTable::parse_csv(&c.to_csv()).unwrap();
        assert_eq!(back.t, c.t);
        assert_eq!(back.value, c.value);
        assert!(back.band.as_ref().unwrap().hi[2].is_nan());
        assert!(
            back.band.unwrap().sd[0].is_nan(),
            "sd not written without tau()"
        );

        let tau = c.clone().tau();
        let back = CurveTable::parse_csv(&tau.to_csv()).unwrap();
        assert_eq!(back.band.unwrap().sd[1], 0.01);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(CurveTable::parse_csv("x,y\n1,2\n").is_err());
    }
}
