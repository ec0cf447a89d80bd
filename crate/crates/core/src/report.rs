use std::fmt;

use serde::{Deserialize, Serialize};

/// One violated invariant, located by level and the vertex, edge or fiber involved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub level: usize,
    pub subject: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, level: usize, subject: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            level,
            subject: subject.into(),
            message: message.into(),
        });
    }

    /// Levels that carry at least one violation, sorted and deduplicated.
    pub fn failing_levels(&self) -> Vec<usize> {
        let mut levels: Vec<usize> = self.violations.iter().map(|v| v.level).collect();
        levels.sort_unstable();
        levels.dedup();
        levels
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(crate::Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "level {}: {}: {}", v.level, v.subject, v.message)?;
        }
        Ok(())
    }
}
