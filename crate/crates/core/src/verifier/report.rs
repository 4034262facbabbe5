use serde::{Deserialize, Serialize};

use super::Statement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Marginal,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Marginal => "marginal",
        }
    }
}

/// Marginal when `|slack| < 10 tol`, otherwise pass iff `slack >= -tol`.
pub fn classify(slack: f64, tol: f64) -> Verdict {
    if slack.abs() < 10.0 * tol {
        Verdict::Marginal
    } else if slack >= -tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// One evaluated slack. `grid` is the time or λ (absent for generator
/// checks); `grid_index` is its position in the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlackEntry {
    pub grid_index: Option<usize>,
    pub grid: Option<f64>,
    pub x_index: usize,
    pub v_index: usize,
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x_index: usize,
    pub v_index: usize,
    pub grid: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementReport {
    pub statement: Statement,
    pub min_slack: f64,
    pub argmin: Option<Witness>,
    pub samples_evaluated: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub entries: Vec<SlackEntry>,
}

impl StatementReport {
    /// Reduces entries to the minimal slack. Ties go to the lowest sample
    /// indices, then the lowest grid index, independent of entry order.
    pub fn from_entries(statement: Statement, tolerance: f64, entries: Vec<SlackEntry>) -> Self {
        let key = |e: &SlackEntry| (e.x_index, e.v_index, e.grid_index.unwrap_or(0));
        let best = entries
            .iter()
            .fold(None::<&SlackEntry>, |best, e| match best {
                Some(b) if b.slack < e.slack || (b.slack == e.slack && key(b) <= key(e)) => Some(b),
                _ => Some(e),
            });
        let min_slack = best.map_or(f64::INFINITY, |b| b.slack);
        StatementReport {
            statement,
            min_slack,
            argmin: best.map(|b| Witness {
                x_index: b.x_index,
                v_index: b.v_index,
                grid: b.grid,
            }),
            samples_evaluated: entries.len(),
            tolerance,
            verdict: if entries.is_empty() {
                Verdict::Pass
            } else {
                classify(min_slack, tolerance)
            },
            entries,
        }
    }

    /// The inequality holds on every sample up to the tolerance, regardless
    /// of the marginal band.
    pub fn holds(&self) -> bool {
        self.min_slack >= -self.tolerance
    }

    pub fn summary(&self) -> String {
        match self.argmin {
            Some(w) => format!(
                "statement {}: {} (min slack {:.6e} at x#{}, v'#{}{})",
                self.statement,
                self.verdict.as_str(),
                self.min_slack,
                w.x_index,
                w.v_index,
                w.grid.map(|g| format!(", grid {g}")).unwrap_or_default()
            ),
            None => format!("statement {}: no samples", self.statement),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(g: usize, x: usize, v: usize, slack: f64) -> SlackEntry {
        SlackEntry {
            grid_index: Some(g),
            grid: Some(g as f64),
            x_index: x,
            v_index: v,
            slack,
        }
    }

    #[test]
    fn verdict_bands() {
        assert_eq!(classify(0.0, 1e-8), Verdict::Marginal);
        assert_eq!(classify(-5e-8, 1e-8), Verdict::Marginal);
        assert_eq!(classify(1e-6, 1e-8), Verdict::Pass);
        assert_eq!(classify(-1e-6, 1e-8), Verdict::Fail);
    }

    #[test]
    fn argmin_tie_breaking_is_order_independent() {
        let mut e = vec![
            entry(1, 0, 0, -1.0),
            entry(0, 2, 0, -1.0),
            entry(0, 0, 0, -1.0),
        ];
        let r1 = StatementReport::from_entries(Statement::A, 1e-8, e.clone());
        e.reverse();
        let r2 = StatementReport::from_entries(Statement::A, 1e-8, e);
        assert_eq!(r1.argmin, r2.argmin);
        assert_eq!(r1.argmin.unwrap().grid, Some(0.0));
        assert_eq!(r1.argmin.unwrap().x_index, 0);
    }

    #[test]
    fn empty_report_passes() {
        let r = StatementReport::from_entries(Statement::C, 1e-8, vec![]);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.argmin.is_none());
    }
}
