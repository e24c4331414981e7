//! `--grid` values: an explicit list `0.1,0.2,0.5` or a range `0:1:0.1`.

use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct GridArg(pub Vec<f64>);

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("bad number `{x}` in grid"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let mut values = match parts.as_slice() {
            [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
            [start, stop, step] => {
                let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
                if step <= 0.0 || stop < start {
                    return Err(format!("empty range `{s}`"));
                }
                // index-based so accumulated rounding cannot drop the endpoint
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|k| start + k as f64 * step).collect()
            }
            _ => {
                return Err(format!(
                    "grid must be `a,b,...` or `start:stop:step`, got `{s}`"
                ))
            }
        };
        if values.is_empty() {
            return Err("empty grid".to_string());
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(GridArg(values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_and_range() {
        assert_eq!("0.5,0.1".parse::<GridArg>().unwrap().0, vec![0.1, 0.5]);
        let r = "0.1:0.9:0.05".parse::<GridArg>().unwrap().0;
        assert_eq!(r.len(), 17);
        assert!((r[16] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn rejects_junk() {
        assert!("a,b".parse::<GridArg>().is_err());
        assert!("1:0:0.1".parse::<GridArg>().is_err());
        assert!("0:1".parse::<GridArg>().is_err());
    }
}
