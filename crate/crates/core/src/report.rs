use serde::{Deserialize, Serialize};

/// Outcome of an exhaustive check: every violation carries a witness.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub subject: String,
    pub checked: u64,
    pub violations: Vec<Violation>,
    /// Set when the violation list was truncated at `violation_limit`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub witness: Vec<String>,
    pub detail: String,
}

impl ValidationReport {
    pub const DEFAULT_LIMIT: usize = 1000;

    pub fn new(subject: impl Into<String>) -> Self {
        ValidationReport {
            subject: subject.into(),
            ..Default::default()
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, rule: &str, witness: Vec<String>, detail: impl Into<String>) {
        if self.violations.len() >= Self::DEFAULT_LIMIT {
            self.truncated = true;
            return;
        }
        self.violations.push(Violation {
            rule: rule.to_string(),
            witness,
            detail: detail.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.checked += other.checked;
        self.truncated |= other.truncated;
        for v in other.violations {
            if self.violations.len() >= Self::DEFAULT_LIMIT {
                self.truncated = true;
                break;
            }
            self.violations.push(v);
        }
    }
}
