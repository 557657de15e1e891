//! Check records and validation reports.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Passes when the measured value is at most the tolerance.
    AtMost,
    /// Passes when the measured value is at least the tolerance.
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub max_defect: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl CheckRecord {
    pub fn new(name: &str, anchor: &str, max_defect: f64, tolerance: f64, bound: Bound) -> Self {
        let mut r = Self {
            name: name.to_string(),
            anchor: anchor.to_string(),
            max_defect,
            tolerance,
            bound,
            passed: false,
            wall_time_ms: None,
        };
        r.rejudge();
        r
    }

    /// Re-evaluates `passed` after a tolerance change. NaN never passes.
    pub fn rejudge(&mut self) {
        self.passed = match self.bound {
            Bound::AtMost => self.max_defect <= self.tolerance,
            Bound::AtLeast => self.max_defect >= self.tolerance,
        };
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub records: Vec<CheckRecord>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn at_most(&mut self, name: &str, anchor: &str, defect: f64, tol: f64) {
        self.records.push(CheckRecord::new(name, anchor, defect, tol, Bound::AtMost));
    }

    pub fn at_least(&mut self, name: &str, anchor: &str, value: f64, tol: f64) {
        self.records.push(CheckRecord::new(name, anchor, value, tol, Bound::AtLeast));
    }

    pub fn pass(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.records.extend(other.records);
    }

    /// Merges per-sample reports record by record, keeping the worst value.
    pub fn merge_worst(reports: impl IntoIterator<Item = ValidationReport>) -> ValidationReport {
        let mut out: Option<ValidationReport> = None;
        for r in reports {
            match &mut out {
                None => out = Some(r),
                Some(acc) => {
                    for (a, b) in acc.records.iter_mut().zip(r.records) {
                        debug_assert_eq!(a.name, b.name);
                        let worse = match a.bound {
                            Bound::AtMost => b.max_defect > a.max_defect || b.max_defect.is_nan(),
                            Bound::AtLeast => b.max_defect < a.max_defect || b.max_defect.is_nan(),
                        };
                        if worse {
                            a.max_defect = b.max_defect;
                        }
                        a.rejudge();
                    }
                }
            }
        }
        out.unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails_both_bounds() {
        assert!(!CheckRecord::new("a", "", f64::NAN, 1.0, Bound::AtMost).passed);
        assert!(!CheckRecord::new("a", "", f64::NAN, 1.0, Bound::AtLeast).passed);
    }

    #[test]
    fn merge_keeps_worst() {
        let mk = |d: f64, v: f64| {
            let mut r = ValidationReport::new();
            r.at_most("d", "", d, 1e-3);
            r.at_least("v", "", v, 1.0);
            r
        };
        let m = ValidationReport::merge_worst(vec![mk(1e-5, 3.0), mk(1e-2, 2.0), mk(0.0, 0.5)]);
        assert_eq!(m.records[0].max_defect, 1e-2);
        assert_eq!(m.records[1].max_defect, 0.5);
        assert!(!m.pass());
    }
}
