//! Experiment runners. Each returns its tables and plots; writing them is
//! left to [`crate::output::emit`].

pub mod compare;
pub mod diagnose;
pub mod inspect;
pub mod lowpass;

use sgs_core::analytics::{mean, std_dev};

use crate::output::{fmt_f, Table};

/// Aggregate of a sample where some entries may be undefined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    pub undefined: usize,
}

impl Summary {
    pub fn of(values: &[Option<f64>]) -> Self {
        let defined: Vec<f64> = values.iter().flatten().copied().collect();
        Self {
            mean: if defined.is_empty() { f64::NAN } else { mean(&defined) },
            std: if defined.is_empty() { f64::NAN } else { std_dev(&defined) },
            n: defined.len(),
            undefined: values.len() - defined.len(),
        }
    }

    pub fn cells(&self) -> [String; 4] {
        [fmt_f(self.mean), fmt_f(self.std), self.n.to_string(), self.undefined.to_string()]
    }
}

pub(crate) const SUMMARY_COLUMNS: [&str; 4] = ["mean", "std", "n", "undefined"];

pub(crate) fn header_with_summary(keys: &[&'static str]) -> Table {
    let cols: Vec<&str> = keys.iter().copied().chain(SUMMARY_COLUMNS).collect();
    Table::new(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_skips_undefined() {
        let s = Summary::of(&[Some(1.0), None, Some(3.0)]);
        assert_eq!((s.mean, s.std, s.n, s.undefined), (2.0, 1.0, 2, 1));
        assert!(Summary::of(&[None]).mean.is_nan());
    }
}
