use serde::{Deserialize, Serialize};

use crate::error::{ImError, Result};
use crate::models::cv::CvStatistic;

/// Real-valued observations, at least two, all finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    observations: Vec<f64>,
}

impl Dataset {
    pub fn new(observations: Vec<f64>) -> Result<Self> {
        if observations.len() < 2 {
            return Err(ImError::InvalidData(format!(
                "need at least 2 observations, got {}",
                observations.len()
            )));
        }
        if let Some(bad) = observations.iter().find(|v| !v.is_finite()) {
            return Err(ImError::InvalidData(format!("non-finite observation {bad}")));
        }
        Ok(Dataset { observations })
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn sufficient_stats(&self) -> Result<SufficientStats> {
        let n = self.observations.len();
        let mean = self.observations.iter().sum::<f64>() / n as f64;
        let ss: f64 = self.observations.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        SufficientStats::new(mean, sd, n)
    }
}

/// Sample mean, sample standard deviation (divisor `n − 1`) and size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientStats {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl SufficientStats {
    pub fn new(mean: f64, sd: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(ImError::InvalidData("need at least 2 observations".into()));
        }
        if !mean.is_finite() || !sd.is_finite() {
            return Err(ImError::InvalidData("non-finite summary statistics".into()));
        }
        if sd <= 0.0 {
            return Err(ImError::DegenerateSample);
        }
        Ok(SufficientStats { mean, sd, n })
    }

    pub fn cv_statistic(&self) -> CvStatistic {
        CvStatistic { t: (self.n as f64).sqrt() * self.mean / self.sd, n: self.n }
    }
}

/// `t = √n · mean / sd`.
pub fn cv_statistic(data: &Dataset) -> Result<CvStatistic> {
    Ok(data.sufficient_stats()?.cv_statistic())
}

/// Reads observations from plain text (one number per line) or from a CSV
/// file whose header has an `x` column.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    let is_csv = first.split(',').any(|h| h.trim().trim_matches('"') == "x");
    let mut values = Vec::new();
    if is_csv {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| ImError::InvalidData(e.to_string()))?.clone();
        let col = headers
            .iter()
            .position(|h| h == "x")
            .ok_or_else(|| ImError::InvalidData("missing column \"x\"".into()))?;
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| ImError::InvalidData(e.to_string()))?;
            let field = record.get(col).unwrap_or("");
            values.push(parse_value(field, i + 2)?);
        }
    } else {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            values.push(parse_value(line, i + 1)?);
        }
    }
    Dataset::new(values)
}

fn parse_value(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| ImError::InvalidData(format!("line {line}: {field:?} is not a number")))?;
    if !v.is_finite() {
        return Err(ImError::InvalidData(format!("line {line}: non-finite value {field:?}")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_examples() {
        let d = Dataset::new(vec![1.0; 5]).unwrap();
        assert_eq!(cv_statistic(&d), Err(ImError::DegenerateSample));

        let s = Dataset::new(vec![-1.0, 1.0]).unwrap().sufficient_stats().unwrap();
        assert_eq!(s.mean, 0.0);
        assert!((s.sd - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.cv_statistic().t, 0.0);

        let t = cv_statistic(&Dataset::new(vec![0.0, 2.0]).unwrap()).unwrap();
        assert!((t.t - 1.0).abs() < 1e-15);
        assert_eq!(t.n, 2);
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![1.0]).is_err());
        assert!(Dataset::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn parses_plain_and_csv() {
        let d = parse_dataset("1.5\n\n# comment\n-2\n3e-1\n").unwrap();
        assert_eq!(d.observations(), &[1.5, -2.0, 0.3]);
        let d = parse_dataset("x\n1\n2\n").unwrap();
        assert_eq!(d.observations(), &[1.0, 2.0]);
        let d = parse_dataset("id,x\n1,0.5\n2,0.25\n").unwrap();
        assert_eq!(d.observations(), &[0.5, 0.25]);
        assert!(parse_dataset("x\n1\ninf\n").is_err());
        assert!(parse_dataset("1\nNaN\n").is_err());
        assert!(parse_dataset("1\nabc\n").is_err());
    }
}
