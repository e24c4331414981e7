//! Right-censored survival samples: data model, CSV ingestion and validation.
//!
//! The only accepted file layout is UTF-8 CSV with a header naming `time`,
//! `status` and optionally `arm` (any case, any column order). `status` is
//! 1 for an observed event and 0 for a censored observation; no other codings
//! are accepted.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Treatment-arm label of a two-sample comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Arm {
    Zero,
    One,
}

impl Arm {
    pub fn index(self) -> usize {
        match self {
            Arm::Zero => 0,
            Arm::One => 1,
        }
    }

    pub fn from_index(i: u8) -> Option<Arm> {
        match i {
            0 => Some(Arm::Zero),
            1 => Some(Arm::One),
            _ => None,
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// One observed record `(X, delta[, arm])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Subject {
    /// Observed time `min(T, C)`.
    pub time: f64,
    /// `true` when the event was observed (`T <= C`).
    pub event: bool,
    pub arm: Option<Arm>,
}

impl Subject {
    pub fn new(time: f64, event: bool) -> Self {
        Self {
            time,
            event,
            arm: None,
        }
    }

    pub fn with_arm(time: f64, event: bool, arm: Arm) -> Self {
        Self {
            time,
            event,
            arm: Some(arm),
        }
    }
}

/// Ordered collection of subjects. Construction does not validate; run
/// [`validate`] before estimation on untrusted data.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Sample {
    subjects: Vec<Subject>,
}

impl Sample {
    pub fn new(subjects: Vec<Subject>) -> Self {
        Self { subjects }
    }

    /// Build from `(time, event)` pairs.
    pub fn from_pairs<I: IntoIterator<Item = (f64, bool)>>(pairs: I) -> Self {
        Self::new(pairs.into_iter().map(|(t, e)| Subject::new(t, e)).collect())
    }

    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    pub fn len(&self) -> usize {
        self.subjects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subjects.is_empty()
    }

    pub fn event_count(&self) -> usize {
        self.subjects.iter().filter(|s| s.event).count()
    }

    pub fn has_arms(&self) -> bool {
        !self.subjects.is_empty() && self.subjects.iter().all(|s| s.arm.is_some())
    }

    /// Subjects of one arm, order preserved.
    pub fn arm(&self, arm: Arm) -> Sample {
        Sample::new(
            self.subjects
                .iter()
                .filter(|s| s.arm == Some(arm))
                .copied()
                .collect(),
        )
    }

    /// Split a labelled sample into (arm 0, arm 1).
    pub fn split_arms(&self) -> Result<(Sample, Sample), ParseError> {
        if let Some(pos) = self.subjects.iter().position(|s| s.arm.is_none()) {
            return Err(ParseError::MissingArm { row: pos + 1 });
        }
        Ok((self.arm(Arm::Zero), self.arm(Arm::One)))
    }

    /// Concatenate two arms into one labelled sample.
    pub fn from_arms(arm0: &Sample, arm1: &Sample) -> Sample {
        let label = |s: &Subject, arm| Subject {
            arm: Some(arm),
            ..*s
        };
        Sample::new(
            arm0.subjects
                .iter()
                .map(|s| label(s, Arm::Zero))
                .chain(arm1.subjects.iter().map(|s| label(s, Arm::One)))
                .collect(),
        )
    }

    /// Nonparametric bootstrap resample: `n` subjects drawn with replacement.
    pub fn resample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        let n = self.subjects.len();
        Sample::new(
            (0..n)
                .map(|_| self.subjects[rng.random_range(0..n)])
                .collect(),
        )
    }

    /// Largest observed time (0 for an empty sample).
    pub fn max_time(&self) -> f64 {
        self.subjects.iter().map(|s| s.time).fold(0.0, f64::max)
    }
}

impl FromIterator<Subject> for Sample {
    fn from_iter<I: IntoIterator<Item = Subject>>(iter: I) -> Self {
        Sample::new(iter.into_iter().collect())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line 1: missing required column `{0}`")]
    MissingColumn(&'static str),
    #[error("line {line}: negative time {value}")]
    NegativeTime { line: usize, value: f64 },
    #[error("line {line}: status must be 0 or 1, got `{value}`")]
    BadStatus { line: usize, value: String },
    #[error("line {line}: arm must be 0 or 1, got `{value}`")]
    BadArm { line: usize, value: String },
    #[error("row {row}: arm label required for a two-sample analysis")]
    MissingArm { row: usize },
    #[error("empty input: no header line")]
    Empty,
}

fn parse_binary(field: &str) -> Option<u8> {
    match field.trim() {
        "0" => Some(0),
        "1" => Some(1),
        _ => None,
    }
}

/// Parse `time,status[,arm]` CSV text. Data row `k` becomes subject `k`.
pub fn parse_csv(text: &str) -> Result<Sample, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| ParseError::Malformed {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(ParseError::Empty);
    }
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let time_col = find("time").ok_or(ParseError::MissingColumn("time"))?;
    let status_col = find("status").ok_or(ParseError::MissingColumn("status"))?;
    let arm_col = find("arm");

    let mut subjects = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| ParseError::Malformed {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let field = |col: usize, name: &str| {
            record.get(col).ok_or_else(|| ParseError::Malformed {
                line,
                message: format!("missing `{name}` field"),
            })
        };

        let raw_time = field(time_col, "time")?;
        let time: f64 = raw_time.parse().map_err(|_| ParseError::Malformed {
            line,
            message: format!("malformed number `{raw_time}`"),
        })?;
        if !time.is_finite() {
            return Err(ParseError::Malformed {
                line,
                message: format!("time must be finite, got `{raw_time}`"),
            });
        }
        if time < 0.0 {
            return Err(ParseError::NegativeTime { line, value: time });
        }

        let raw_status = field(status_col, "status")?;
        let status = parse_binary(raw_status).ok_or_else(|| ParseError::BadStatus {
            line,
            value: raw_status.to_string(),
        })?;

        let arm = match arm_col {
            Some(col) => {
                let raw = field(col, "arm")?;
                let arm = parse_binary(raw).and_then(Arm::from_index).ok_or_else(|| {
                    ParseError::BadArm {
                        line,
                        value: raw.to_string(),
                    }
                })?;
                Some(arm)
            }
            None => None,
        };

        subjects.push(Subject {
            time,
            event: status == 1,
            arm,
        });
    }
    Ok(Sample::new(subjects))
}

/// Serialize to the CSV layout accepted by [`parse_csv`]. Times use the
/// shortest round-trip representation.
pub fn to_csv(sample: &Sample) -> String {
    let with_arm = sample.subjects.iter().any(|s| s.arm.is_some());
    let mut out = String::from(if with_arm {
        "time,status,arm\n"
    } else {
        "time,status\n"
    });
    for s in &sample.subjects {
        let status = u8::from(s.event);
        match (with_arm, s.arm) {
            (true, Some(arm)) => out.push_str(&format!("{},{},{}\n", s.time, status, arm)),
            (true, None) => out.push_str(&format!("{},{},\n", s.time, status)),
            _ => out.push_str(&format!("{},{}\n", s.time, status)),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Issue {
    NoSubjects,
    NoEvents,
    NegativeTime { index: usize, time: f64 },
    NonFiniteTime { index: usize },
    EventCensoringTie { time: f64 },
    AllCensoredArm { arm: Arm },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::NoSubjects => write!(f, "no subjects"),
            Issue::NoEvents => write!(f, "no events; cure-rate estimate undefined"),
            Issue::NegativeTime { index, time } => {
                write!(f, "negative time {time} at subject {}", index + 1)
            }
            Issue::NonFiniteTime { index } => write!(f, "non-finite time at subject {}", index + 1),
            Issue::EventCensoringTie { time } => {
                write!(f, "event/censoring tie at t={time}; events ordered first")
            }
            Issue::AllCensoredArm { arm } => write!(f, "no events in arm {arm}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub fatal: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.fatal.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.fatal.is_empty() && self.warnings.is_empty()
    }
}

/// Collect fatal issues and warnings; never fails.
pub fn validate(sample: &Sample) -> ValidationReport {
    let mut report = ValidationReport::default();
    if sample.is_empty() {
        report.fatal.push(Issue::NoSubjects);
        return report;
    }
    for (index, s) in sample.subjects.iter().enumerate() {
        if !s.time.is_finite() {
            report.fatal.push(Issue::NonFiniteTime { index });
        } else if s.time < 0.0 {
            report.fatal.push(Issue::NegativeTime {
                index,
                time: s.time,
            });
        }
    }
    if sample.event_count() == 0 {
        report.fatal.push(Issue::NoEvents);
    }

    let mut sorted: Vec<&Subject> = sample.subjects.iter().collect();
    sorted.sort_by(|a, b| a.time.total_cmp(&b.time));
    for group in sorted.chunk_by(|a, b| a.time == b.time) {
        let events = group.iter().any(|s| s.event);
        let censored = group.iter().any(|s| !s.event);
        if events && censored {
            report.warnings.push(Issue::EventCensoringTie {
                time: group[0].time,
            });
        }
    }

    if sample.subjects.iter().any(|s| s.arm.is_some()) {
        for arm in [Arm::Zero, Arm::One] {
            let sub = sample.arm(arm);
            if !sub.is_empty() && sub.event_count() == 0 {
                report.warnings.push(Issue::AllCensoredArm { arm });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_two_rows() {
        let s = parse_csv("time,status\n1,1\n2,0").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.subjects()[0], Subject::new(1.0, true));
        assert_eq!(s.subjects()[1], Subject::new(2.0, false));
    }

    #[test]
    fn rejects_negative_time_with_line_number() {
        let err = parse_csv("time,status\n-1,1").unwrap_err();
        assert_eq!(
            err,
            ParseError::NegativeTime {
                line: 2,
                value: -1.0
            }
        );
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn parses_arms() {
        let s = parse_csv("time,status,arm\n1,1,0\n2,1,1").unwrap();
        let arms: Vec<_> = s.subjects().iter().map(|s| s.arm).collect();
        assert_eq!(arms, vec![Some(Arm::Zero), Some(Arm::One)]);
    }

    #[test]
    fn header_is_case_insensitive_and_reorderable() {
        let s = parse_csv("Status,TIME\n0,3.5\n").unwrap();
        assert_eq!(s.subjects()[0], Subject::new(3.5, false));
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(matches!(
            parse_csv("time,status\n1,2"),
            Err(ParseError::BadStatus { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv("time,status,arm\n1,1,0\n1,1,3"),
            Err(ParseError::BadArm { line: 3, .. })
        ));
        assert!(matches!(
            parse_csv("time,status\n1,1\nabc,0"),
            Err(ParseError::Malformed { line: 3, .. })
        ));
        assert_eq!(
            parse_csv("time,event\n1,1"),
            Err(ParseError::MissingColumn("status"))
        );
        assert!(parse_csv("time,status\ninf,1").is_err());
    }

    #[test]
    fn validate_flags_no_events() {
        let s = Sample::from_pairs([(1.0, false), (2.0, false)]);
        let r = validate(&s);
        assert_eq!(r.fatal, vec![Issue::NoEvents]);
        assert!(r.fatal[0].to_string().starts_with("no events"));
    }

    #[test]
    fn validate_warns_on_tie() {
        let s = Sample::from_pairs([(2.0, true), (2.0, false), (3.0, true)]);
        let r = validate(&s);
        assert!(r.is_ok());
        assert_eq!(r.warnings, vec![Issue::EventCensoringTie { time: 2.0 }]);
    }

    #[test]
    fn validate_clean_two_arm_sample() {
        let s = parse_csv("time,status,arm\n1,1,0\n2,0,0\n1.5,1,1\n3,0,1").unwrap();
        assert!(validate(&s).is_empty());
    }

    #[test]
    fn validate_all_censored_arm() {
        let s = parse_csv("time,status,arm\n1,0,0\n2,0,0\n1.5,1,1").unwrap();
        let r = validate(&s);
        assert_eq!(r.warnings, vec![Issue::AllCensoredArm { arm: Arm::Zero }]);
        assert_eq!(r.warnings[0].to_string(), "no events in arm 0");
    }

    #[test]
    fn validate_empty_and_negative() {
        assert_eq!(validate(&Sample::default()).fatal, vec![Issue::NoSubjects]);
        let r = validate(&Sample::from_pairs([(-1.0, true)]));
        assert!(r.fatal.contains(&Issue::NegativeTime {
            index: 0,
            time: -1.0
        }));
    }

    fn subject_strategy() -> impl Strategy<Value = Subject> {
        (0.0f64..1e6, any::<bool>(), proptest::option::of(0u8..2)).prop_map(|(t, e, a)| Subject {
            time: t,
            event: e,
            arm: a.and_then(Arm::from_index),
        })
    }

    proptest! {
        #[test]
        fn csv_round_trip(mut subjects in proptest::collection::vec(subject_strategy(), 1..50), labelled in any::<bool>()) {
            for s in &mut subjects {
                if labelled && s.arm.is_none() { s.arm = Some(Arm::One); }
                if !labelled { s.arm = None; }
            }
            let sample = Sample::new(subjects);
            let text = to_csv(&sample);
            let back = parse_csv(&text).unwrap();
            prop_assert_eq!(&back, &sample);
            prop_assert_eq!(to_csv(&back), text);
        }
    }
}
